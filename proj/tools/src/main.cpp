#include <iostream>

#include "hevt_app/cli.hpp"

int main(int argc, char** argv) { return hevt::app::run_cli(argc, argv, std::cout, std::cerr); }
