#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include <mcdiag.h>

struct ChainsetDeleter {
  void operator()(mcd_chainset* p) const { mcd_chainset_free(p); }
};
using ChainsetPtr = std::unique_ptr<mcd_chainset, ChainsetDeleter>;

struct ReportDeleter {
  void operator()(mcd_report* p) const { mcd_report_free(p); }
};
using ReportPtr = std::unique_ptr<mcd_report, ReportDeleter>;

struct SamplerDeleter {
  void operator()(mcd_sampler* p) const { mcd_sampler_free(p); }
};
using SamplerPtr = std::unique_ptr<mcd_sampler, SamplerDeleter>;

struct MonitorDeleter {
  void operator()(mcd_monitor_result* p) const { mcd_monitor_free(p); }
};
using MonitorPtr = std::unique_ptr<mcd_monitor_result, MonitorDeleter>;

struct StringDeleter {
  void operator()(char* p) const { mcd_string_free(p); }
};
using CStringPtr = std::unique_ptr<char, StringDeleter>;

inline void check(mcd_status st) {
  if (st != MCD_OK) throw std::runtime_error(mcd_last_error());
}

// "sqrt", "cube", or an explicit batch size.
void parse_batch(const std::string& text, int& policy, int64_t& size);

// Map --stat/--mv to an mcd_statistic; empty mv picks the family default.
int pick_statistic(const std::string& stat, const std::string& mv);

std::string read_text_file(const std::string& path);
void write_text_file_atomic(const std::string& path, const std::string& content);
