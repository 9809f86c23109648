#include "cli.hpp"

int main(int argc, char** argv) { return svx::cli::run(argc, argv); }
