#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sjlt/text.hpp"
#include "sjlt/vector.hpp"

namespace sjlt {

/// Malformed text input; line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::uint64_t line, const std::string& msg)
      : std::runtime_error(line == 0 ? msg : "line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::uint64_t line() const { return line_; }

 private:
  std::uint64_t line_;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

enum class VectorFormat { kSparse, kDense };

/// `sparse <d>` followed by `<index> <value>` lines (0-based, duplicates add),
/// or `dense <d>` followed by d whitespace-separated reals.
struct VectorFile {
  VectorFormat format = VectorFormat::kSparse;
  SparseVector vec;
};

inline VectorFile read_vector_file(std::istream& in) {
  std::string line;
  std::uint64_t lineno = 0;
  std::vector<std::string_view> tok;
  while (std::getline(in, line)) {
    ++lineno;
    tok = detail::split_ws(line);
    if (!tok.empty()) break;
  }
  if (tok.empty()) throw ParseError(lineno, "missing header (expected 'sparse <d>' or 'dense <d>')");
  if (tok.size() != 2 || (tok[0] != "sparse" && tok[0] != "dense")) {
    throw ParseError(lineno, "bad header '" + line + "' (expected 'sparse <d>' or 'dense <d>')");
  }
  const auto d = parse_integer<std::uint64_t>(tok[1]);
  if (!d || *d == 0) throw ParseError(lineno, "dimension must be a positive integer");

  VectorFile f;
  f.vec.dim = *d;
  if (tok[0] == "sparse") {
    f.format = VectorFormat::kSparse;
    while (std::getline(in, line)) {
      ++lineno;
      tok = detail::split_ws(line);
      if (tok.empty()) continue;
      if (tok.size() != 2) throw ParseError(lineno, "expected '<index> <value>'");
      const auto j = parse_integer<std::uint64_t>(tok[0]);
      if (!j) throw ParseError(lineno, "bad index '" + std::string(tok[0]) + "'");
      if (*j >= *d) {
        throw ParseError(lineno, "index " + std::to_string(*j) + " out of range for dimension " + std::to_string(*d));
      }
      const auto v = parse_real(tok[1]);
      if (!v) throw ParseError(lineno, "bad value '" + std::string(tok[1]) + "'");
      f.vec.push(*j, *v);
    }
    return f;
  }

  f.format = VectorFormat::kDense;
  std::uint64_t count = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (std::string_view t : detail::split_ws(line)) {
      const auto v = parse_real(t);
      if (!v) throw ParseError(lineno, "bad value '" + std::string(t) + "'");
      if (count >= *d) throw ParseError(lineno, "more than " + std::to_string(*d) + " values");
      if (*v != 0.0) f.vec.push(count, *v);
      ++count;
    }
  }
  if (count != *d) {
    throw ParseError(lineno, "expected " + std::to_string(*d) + " values, found " + std::to_string(count));
  }
  return f;
}

/// `dense <n>` then one shortest round-trip value per line.
inline void write_dense(std::ostream& out, std::span<const double> y) {
  out << "dense " << y.size() << '\n';
  for (double v : y) out << format_real(v) << '\n';
}

inline void write_sparse(std::ostream& out, const SparseVector& x) {
  out << "sparse " << x.dim << '\n';
  for (const auto& e : x.entries) out << e.index << ' ' << format_real(e.value) << '\n';
}

/// One `<index> <delta>` turnstile update. Blank lines yield nullopt.
inline std::optional<SparseEntry> parse_update_line(std::string_view line, std::uint64_t lineno) {
  const auto tok = detail::split_ws(line);
  if (tok.empty()) return std::nullopt;
  if (tok.size() != 2) throw ParseError(lineno, "expected '<index> <delta>'");
  const auto j = parse_integer<std::uint64_t>(tok[0]);
  if (!j) throw ParseError(lineno, "bad index '" + std::string(tok[0]) + "'");
  const auto v = parse_real(tok[1]);
  if (!v) throw ParseError(lineno, "bad delta '" + std::string(tok[1]) + "'");
  return SparseEntry{*j, *v};
}

/// Serialized Phi sketch:
///
///   sketch
///   seed=<u64>
///   k=<rows>
///   dim=<d>
///   c=<replication>
///   updates=<count>
///   sq_norm=<sum of squares>
///   values
///   <k lines, one real each>
struct SketchRecord {
  std::uint64_t seed = 0;
  std::uint64_t k = 0;
  std::uint64_t dim = 0;
  std::uint64_t c = 0;
  std::uint64_t updates = 0;
  std::vector<double> values;
};

inline void write_sketch(std::ostream& out, const SketchRecord& r) {
  out << "sketch\n";
  out << "seed=" << r.seed << '\n';
  out << "k=" << r.k << '\n';
  out << "dim=" << r.dim << '\n';
  out << "c=" << r.c << '\n';
  out << "updates=" << r.updates << '\n';
  out << "sq_norm=" << format_real(sq_norm(r.values)) << '\n';
  out << "values\n";
  for (double v : r.values) out << format_real(v) << '\n';
}

inline SketchRecord read_sketch(std::istream& in) {
  std::string line;
  std::uint64_t lineno = 0;
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!detail::split_ws(line).empty()) return true;
    }
    return false;
  };
  if (!next() || detail::split_ws(line)[0] != "sketch") throw ParseError(lineno, "expected 'sketch' header");

  std::map<std::string, std::uint64_t, std::less<>> fields;
  while (true) {
    if (!next()) throw ParseError(lineno, "unexpected end of sketch header");
    const auto tok = detail::split_ws(line);
    if (tok[0] == "values") break;
    const auto eq = tok[0].find('=');
    if (tok.size() != 1 || eq == std::string_view::npos) throw ParseError(lineno, "expected name=value");
    const std::string name(tok[0].substr(0, eq));
    if (name == "sq_norm") continue;  // derived
    const auto v = parse_integer<std::uint64_t>(tok[0].substr(eq + 1));
    if (!v) throw ParseError(lineno, "bad value for '" + name + "'");
    fields[name] = *v;
  }
  SketchRecord r;
  for (const char* key : {"seed", "k", "dim", "c", "updates"}) {
    if (!fields.contains(key)) throw ParseError(lineno, std::string("sketch header missing '") + key + "'");
  }
  r.seed = fields["seed"];
  r.k = fields["k"];
  r.dim = fields["dim"];
  r.c = fields["c"];
  r.updates = fields["updates"];
  while (r.values.size() < r.k && next()) {
    for (std::string_view t : detail::split_ws(line)) {
      const auto v = parse_real(t);
      if (!v) throw ParseError(lineno, "bad value '" + std::string(t) + "'");
      r.values.push_back(*v);
    }
  }
  if (r.values.size() != r.k) throw ParseError(lineno, "expected " + std::to_string(r.k) + " sketch values");
  return r;
}

}  // namespace sjlt
