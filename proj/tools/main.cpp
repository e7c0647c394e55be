#include "commands.hpp"

int main(int argc, char** argv) { return fnt::cli::run(argc, argv); }
