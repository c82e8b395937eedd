// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "anderson/cli.hpp"

int main(int argc, char** argv) { return anderson::cli_dispatch(argc, argv); }
