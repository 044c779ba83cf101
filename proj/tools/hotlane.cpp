#include "hotlane/cli.hpp"

int main(int argc, char** argv) { return hotlane::cli::run(argc, argv); }
