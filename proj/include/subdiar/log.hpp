// subdiar/log.hpp

#pragma once

#include <functional>
#include <string>

namespace subdiar {

using LogSink = std::function<void(const std::string &)>;

/// Warnings go to stderr unless a sink is installed. Returns the old sink.
LogSink set_warning_sink(LogSink sink);

void log_warning(const std::string &msg);

}  // namespace subdiar
