// This file is part of gff.
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).

#include "gff/cli.hpp"

int main(int argc, char** argv) { return gff::cli::main_entry(argc, argv); }
