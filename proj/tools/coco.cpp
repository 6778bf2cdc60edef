#include "coco/cli.hpp"

int main(int argc, char** argv) { return coco::run_cli(argc, argv); }
