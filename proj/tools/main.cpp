#include "aai/cli.hpp"

int main(int argc, char** argv) { return aai::dispatch(argc, argv); }
