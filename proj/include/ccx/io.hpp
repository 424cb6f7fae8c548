#pragma once

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ccx/errors.hpp"
#include "ccx/grid.hpp"

namespace ccx {

static_assert(std::endian::native == std::endian::little,
              "fgrid payloads are little-endian; big-endian hosts are not supported");

namespace detail {

inline std::string lower_ext(const std::string& path) {
  auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Skips PGM whitespace and '#' comments, then reads one unsigned integer.
inline long pgm_int(std::istream& in) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF || !std::isdigit(c)) throw io_error("malformed pgm header");
  long v = 0;
  while (c != EOF && std::isdigit(c)) {
    v = v * 10 + (c - '0');
    c = in.get();
  }
  return v;
}

}  // namespace detail

// --- fgrid: small self-describing container, text header + raw float64 ---
//
//   fgrid 1
//   dims 2
//   shape 41 41
//   spacing 1 1
//   origin 0 0
//   data
//   <shape-product little-endian float64>

inline void write_fgrid(const ScalarGrid& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << "fgrid 1\n";
  out << "dims " << g.ndim() << "\n";
  out << "shape";
  for (int n : g.shape()) out << ' ' << n;
  out << "\nspacing";
  for (double s : g.spacing()) out << ' ' << detail::fmt_double(s);
  out << "\norigin";
  for (double o : g.origin()) out << ' ' << detail::fmt_double(o);
  out << "\ndata\n";
  out.write(reinterpret_cast<const char*>(g.data()),
            static_cast<std::streamsize>(g.size() * sizeof(double)));
  if (!out) throw io_error("short write to '" + path + "'");
}

inline ScalarGrid read_fgrid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::string line, word;

  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) throw io_error(std::string("fgrid: missing ") + what);
    return std::istringstream(line);
  };

  auto head = next_line("magic");
  int version = 0;
  if (!(head >> word >> version) || word != "fgrid" || version != 1)
    throw io_error("fgrid: bad magic in '" + path + "'");

  auto dims_line = next_line("dims");
  int nd = 0;
  if (!(dims_line >> word >> nd) || word != "dims" || nd < 1 || nd > kMaxDims)
    throw io_error("fgrid: bad dims line");

  std::vector<int> shape(nd);
  auto shape_line = next_line("shape");
  if (!(shape_line >> word) || word != "shape") throw io_error("fgrid: bad shape line");
  for (auto& n : shape)
    if (!(shape_line >> n)) throw io_error("fgrid: bad shape line");

  std::vector<double> spacing(nd), origin(nd);
  auto spacing_line = next_line("spacing");
  if (!(spacing_line >> word) || word != "spacing") throw io_error("fgrid: bad spacing line");
  for (auto& s : spacing)
    if (!(spacing_line >> s)) throw io_error("fgrid: bad spacing line");
  auto origin_line = next_line("origin");
  if (!(origin_line >> word) || word != "origin") throw io_error("fgrid: bad origin line");
  for (auto& o : origin)
    if (!(origin_line >> o)) throw io_error("fgrid: bad origin line");

  if (!std::getline(in, line) || line != "data") throw io_error("fgrid: missing data marker");

  std::vector<double> values(detail::cell_count(shape));
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(values.size() * sizeof(double)))
    throw io_error("fgrid: truncated payload in '" + path + "'");
  return ScalarGrid(shape, std::move(values), spacing, origin);
}

// --- PGM (P2 ascii / P5 binary, 8- or 16-bit) -------------------------------

inline ScalarGrid read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  char m0 = 0, m1 = 0;
  in.get(m0).get(m1);
  if (m0 != 'P' || (m1 != '2' && m1 != '5')) throw io_error("not a P2/P5 pgm: '" + path + "'");
  const bool binary = m1 == '5';
  const long w = detail::pgm_int(in);
  const long h = detail::pgm_int(in);
  const long maxval = detail::pgm_int(in);
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) throw io_error("bad pgm dimensions");

  std::vector<double> values(static_cast<std::size_t>(w) * h);
  if (binary) {
    // Header ends with exactly one whitespace byte (already consumed by pgm_int).
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<std::uint8_t> raw(values.size() * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
      throw io_error("truncated pgm payload");
    for (std::size_t i = 0; i < values.size(); ++i)
      values[i] = bytes == 1 ? raw[i] : raw[2 * i] * 256.0 + raw[2 * i + 1];
  } else {
    for (auto& v : values) v = static_cast<double>(detail::pgm_int(in));
  }
  return ScalarGrid({static_cast<int>(h), static_cast<int>(w)}, std::move(values));
}

inline void write_pgm(const ScalarGrid& g, const std::string& path, int maxval = 255) {
  if (g.ndim() != 2) throw io_error("pgm output needs a 2-D grid");
  if (maxval < 1 || maxval > 65535) throw io_error("pgm maxval out of range");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  const int h = g.shape()[0], w = g.shape()[1];
  out << "P5\n" << w << ' ' << h << '\n' << maxval << '\n';
  auto quant = [&](double v) {
    long q = std::lround(v);
    return static_cast<long>(std::clamp(q, 0L, static_cast<long>(maxval)));
  };
  if (maxval > 255) {
    std::vector<std::uint8_t> raw(g.size() * 2);
    for (std::size_t i = 0; i < g.size(); ++i) {
      long q = quant(g[i]);
      raw[2 * i] = static_cast<std::uint8_t>(q >> 8);
      raw[2 * i + 1] = static_cast<std::uint8_t>(q & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  } else {
    std::vector<std::uint8_t> raw(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) raw[i] = static_cast<std::uint8_t>(quant(g[i]));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  }
  if (!out) throw io_error("short write to '" + path + "'");
}

// --- CSV (2-D only) ----------------------------------------------------------

inline ScalarGrid read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::vector<double> values;
  std::string line;
  long cols = -1, rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    long c = 0;
    while (std::getline(ls, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw io_error("csv: bad number '" + cell + "' in '" + path + "'");
      }
      ++c;
    }
    if (cols < 0) cols = c;
    if (c != cols) throw io_error("csv: ragged rows in '" + path + "'");
    ++rows;
  }
  if (rows == 0 || cols < 1) throw io_error("csv: no data in '" + path + "'");
  return ScalarGrid({static_cast<int>(rows), static_cast<int>(cols)}, std::move(values));
}

inline void write_csv(const ScalarGrid& g, const std::string& path) {
  if (g.ndim() != 2) throw io_error("csv output needs a 2-D grid");
  std::ofstream out(path, std::ios::binary);  // binary: keep '\n' exact
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  const int h = g.shape()[0], w = g.shape()[1];
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (c) out << ',';
      out << detail::fmt_double(g[static_cast<std::size_t>(r) * w + c]);
    }
    out << '\n';
  }
  if (!out) throw io_error("short write to '" + path + "'");
}

// --- extension dispatch ------------------------------------------------------

inline ScalarGrid read_grid(const std::string& path) {
  const auto ext = detail::lower_ext(path);
  if (ext == "fgrid") return read_fgrid(path);
  if (ext == "pgm") return read_pgm(path);
  if (ext == "csv") return read_csv(path);
  throw io_error("unknown grid format '" + path + "' (expected .fgrid/.pgm/.csv)");
}

inline void write_grid(const ScalarGrid& g, const std::string& path) {
  const auto ext = detail::lower_ext(path);
  if (ext == "fgrid") return write_fgrid(g, path);
  if (ext == "pgm") return write_pgm(g, path);
  if (ext == "csv") return write_csv(g, path);
  throw io_error("unknown grid format '" + path + "' (expected .fgrid/.pgm/.csv)");
}

// Masks travel as grids: nonzero means inside. PGM masks use 0/255 so they
// stay visible in image viewers; other formats use 0/1.
inline MaskGrid read_mask(const std::string& path) {
  ScalarGrid g = read_grid(path);
  std::vector<std::uint8_t> flags(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) flags[i] = g[i] != 0.0 ? 1 : 0;
  return MaskGrid(g.shape(), std::move(flags), g.spacing(), g.origin());
}

inline void write_mask(const MaskGrid& m, const std::string& path) {
  const double hi = detail::lower_ext(path) == "pgm" ? 255.0 : 1.0;
  write_grid(char_grid(m, hi), path);
}

}  // namespace ccx
