#include "stacksa/cli/commands.hpp"

int main(int argc, char** argv) { return stacksa::cli::run(argc, argv); }
