#include "cotran/harness.hpp"

int main(int argc, char** argv) { return cotran::harness::run_cli(argc, argv); }
