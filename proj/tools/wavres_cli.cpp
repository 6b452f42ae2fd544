#include <string>
#include <vector>

#include "wavres/pipeline.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return wavres::cli_dispatch(args);
}
