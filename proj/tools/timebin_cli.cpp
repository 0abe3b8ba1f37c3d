#include "cli.hpp"

int main(int argc, char** argv) { return timebin::cli::run(argc, argv); }
