// Copyright 2026 The vgqec developers.
//
// This source code is licensed under the Apache License, Version 2.0 found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include "vgqec/ansatz.hpp"
#include "vgqec/channels.hpp"
#include "vgqec/codes.hpp"
#include "vgqec/experiments.hpp"
#include "vgqec/qcore.hpp"
#include "vgqec/recovery.hpp"
#include "vgqec/util.hpp"
#include "vgqec/varopt.hpp"
