#include "shiftlog/cli.hpp"

int main(int argc, char** argv) { return shiftlog::cli::main_entry(argc, argv); }
