#include <cmath>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>

#include "core/chains.hpp"

namespace mcdiag {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Data rows are numbered from 1 (the header, when present, is not counted).
[[noreturn]] void cell_error(std::size_t row, std::size_t col, const std::string& what) {
  fail(Errc::parse,
       "csv: row " + std::to_string(row) + ", column " + std::to_string(col) + ": " + what);
}

}  // namespace

Matrix load_chain_csv(const std::filesystem::path& path, bool header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "csv: cannot open '" + path.string() + "'");

  Matrix out;
  std::string line;
  std::size_t data_row = 0;
  bool saw_header = false;
  std::vector<double> values;

  while (std::getline(in, line)) {
    std::string_view rest(line);
    if (!rest.empty() && rest.back() == '\r') rest.remove_suffix(1);
    if (trim(rest).empty()) continue;  // blank lines tolerated anywhere
    if (header && !saw_header) {
      saw_header = true;
      continue;
    }
    ++data_row;

    std::size_t col = 0;
    values.clear();
    while (true) {
      ++col;
      const std::size_t comma = rest.find(',');
      std::string_view cell = trim(comma == std::string_view::npos ? rest : rest.substr(0, comma));
      if (cell.empty()) cell_error(data_row, col, "empty cell");
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec == std::errc::result_out_of_range)
        cell_error(data_row, col, "value out of range: '" + std::string(cell) + "'");
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        cell_error(data_row, col, "not a number: '" + std::string(cell) + "'");
      if (!std::isfinite(v))
        cell_error(data_row, col, "non-finite value: '" + std::string(cell) + "'");
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }

    if (out.cols == 0) {
      out.cols = values.size();
    } else if (values.size() != out.cols) {
      fail(Errc::parse, "csv: row " + std::to_string(data_row) + " has " +
                            std::to_string(values.size()) + " cells, expected " +
                            std::to_string(out.cols));
    }
    out.data.insert(out.data.end(), values.begin(), values.end());
    ++out.rows;
  }
  if (in.bad()) fail(Errc::io, "csv: read error on '" + path.string() + "'");
  if (out.rows == 0) fail(Errc::parse, "csv: '" + path.string() + "' contains no data rows");
  return out;
}

void write_chain_csv(const std::filesystem::path& path, const ChainSet& cs,
                     std::size_t chain, bool header) {
  if (chain >= cs.chains()) fail(Errc::invalid_argument, "write_chain_csv: chain out of range");
  std::ofstream outf(path, std::ios::binary | std::ios::trunc);
  if (!outf) fail(Errc::io, "csv: cannot open '" + path.string() + "' for writing");

  const std::size_t p = cs.dimension();
  std::string buf;
  if (header) {
    for (std::size_t k = 0; k < p; ++k) {
      if (k) buf += ',';
      buf += "x" + std::to_string(k + 1);
    }
    buf += '\n';
  }
  char num[40];
  for (std::size_t t = 0; t < cs.iterations(); ++t) {
    for (std::size_t k = 0; k < p; ++k) {
      // 17 significant digits: shortest representation guaranteed to
      // round-trip an IEEE double.
      std::snprintf(num, sizeof num, "%.17g", cs.at(chain, t, k));
      if (k) buf += ',';
      buf += num;
    }
    buf += '\n';
  }
  outf << buf;
  if (!outf) fail(Errc::io, "csv: write error on '" + path.string() + "'");
}

}  // namespace mcdiag
