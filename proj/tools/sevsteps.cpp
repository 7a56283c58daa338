#include "sevsteps/cli/commands.hpp"

int main(int argc, char** argv) { return sevsteps::cli::main_entry(argc, argv); }
