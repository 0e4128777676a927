#include "fracsum/bench/config.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    const auto parsed = fracsum::bench::parse_command_line(argc, argv, std::cout, std::cerr);
    if (!parsed.config)
        return parsed.exit_code;
    return fracsum::bench::run(*parsed.config, std::cout, std::cerr);
}
