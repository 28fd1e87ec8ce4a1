// subdiar/log.cpp

#include "subdiar/log.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace subdiar {

namespace {

std::mutex g_mutex;
LogSink g_sink;

}  // namespace

LogSink set_warning_sink(LogSink sink) {
  std::lock_guard<std::mutex> lock(g_mutex);
  return std::exchange(g_sink, std::move(sink));
}

void log_warning(const std::string &msg) {
  std::lock_guard<std::mutex> lock(g_mutex);
  if (g_sink) {
    g_sink(msg);
  } else {
    std::cerr << "[warn] " << msg << '\n';
  }
}

}  // namespace subdiar
