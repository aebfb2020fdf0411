#include "commands.hpp"

int main(int argc, char** argv) { return glle::cli::run(argc, argv); }
