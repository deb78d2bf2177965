#include <iostream>
#include <string>
#include <vector>

#include "cryptkit/cli.hpp"

int main(int argc, char** argv)
{
    return cryptkit::cli::dispatch(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
