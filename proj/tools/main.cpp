#include <string>
#include <vector>

#include "tpa/cli.hpp"

int main(int argc, char** argv) {
    return tpa::run_cli(std::vector<std::string>(argv, argv + argc));
}
