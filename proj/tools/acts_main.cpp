#include <string>
#include <vector>

#include "acts/cli.hpp"

int main(int argc, char** argv) { return acts::cli_main(std::vector<std::string>(argv, argv + argc)); }
