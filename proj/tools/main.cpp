#include "ivmc/cli/cli.hpp"

#include <iostream>

int main(int argc, char **argv) {
	return ivmc::run_cli(argc, argv, std::cout, std::cerr);
}
