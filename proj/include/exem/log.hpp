#pragma once

#include <memory>

#include <spdlog/logger.h>

namespace exem {

/// Library-wide logger ("exem"), created on first use and writing to stderr.
std::shared_ptr<spdlog::logger> logger();

}  // namespace exem
