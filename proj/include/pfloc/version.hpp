// Copyright (c) 2026 pfloc developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace pfloc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pfloc
