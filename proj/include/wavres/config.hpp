#pragma once

#include <map>
#include <string>
#include <vector>

#include "wavres/errors.hpp"

namespace wavres {

// UTF-8 key=value configuration with '#' comments. Keys are namespaced
// strings like "train.lr_start"; later assignments override earlier ones.
class Config {
public:
    Config() = default;

    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    // Parses one "key=value" token, e.g. a CLI override.
    void set_pair(const std::string& pair);

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    // Comma-separated integer list, e.g. "4,4,4,2".
    std::vector<int> get_int_list(const std::string& key,
                                  const std::vector<int>& fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace wavres
