#include "fawcon/frame_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace fawcon {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_blank_or_comment(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
  throw ParseError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

void append_real(std::string& out, double v) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.6f", v);
  out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

Frame parse_frame(std::istream& in, std::string_view source, std::int64_t index) {
  Frame frame;
  frame.index = index;
  std::string line;
  std::size_t lineno = 0;

  bool have_header = false;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    const auto tok = split_ws(line);
    if (!have_header) {
      long long m = 0, d = 0;
      int gt = 0;
      if (tok.size() != 4 || tok[0] != "FAWF1" || !parse_number(tok[1], m) ||
          !parse_number(tok[2], d) || !parse_number(tok[3], gt) || m < 0 || d <= 0 ||
          (gt != 0 && gt != 1)) {
        fail(source, lineno, "expected header 'FAWF1 <M> <D_in> <has_gt 0|1>'");
      }
      expected = static_cast<std::size_t>(m);
      frame.input_dim = static_cast<std::size_t>(d);
      frame.has_labels = gt == 1;
      frame.observations.reserve(expected);
      have_header = true;
      continue;
    }
    if (frame.observations.size() == expected) fail(source, lineno, "more observations than declared");
    const std::size_t fields = 3 + frame.input_dim + (frame.has_labels ? 1 : 0);
    if (tok.size() != fields) {
      fail(source, lineno,
           "expected " + std::to_string(fields) + " fields, got " + std::to_string(tok.size()));
    }
    Observation obs;
    for (int a = 0; a < 3; ++a) {
      if (!parse_number(tok[a], obs.position[a]) || !std::isfinite(obs.position[a])) {
        fail(source, lineno, "bad coordinate '" + std::string(tok[a]) + "'");
      }
    }
    obs.feature.resize(frame.input_dim);
    for (std::size_t i = 0; i < frame.input_dim; ++i) {
      double v = 0.0;
      if (!parse_number(tok[3 + i], v) || !std::isfinite(v)) {
        fail(source, lineno, "bad feature value '" + std::string(tok[3 + i]) + "'");
      }
      obs.feature[i] = static_cast<float>(v);
    }
    if (frame.has_labels) {
      int label = 0;
      if (!parse_number(tok.back(), label) || label < 0) {
        fail(source, lineno, "bad label '" + std::string(tok.back()) + "'");
      }
      obs.label = label;
    }
    frame.observations.push_back(std::move(obs));
  }
  if (!have_header) fail(source, lineno, "missing FAWF1 header");
  if (frame.observations.size() != expected) {
    fail(source, lineno,
         "declared " + std::to_string(expected) + " observations, found " +
             std::to_string(frame.observations.size()));
  }
  return frame;
}

Frame read_frame(const std::filesystem::path& path, std::int64_t index) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open frame file " + path.string());
  return parse_frame(in, path.string(), index);
}

void write_frame(std::ostream& out, const Frame& frame) {
  std::string buf = "FAWF1 " + std::to_string(frame.observations.size()) + " " +
                    std::to_string(frame.input_dim) + " " + (frame.has_labels ? "1" : "0") + "\n";
  for (const auto& obs : frame.observations) {
    for (int a = 0; a < 3; ++a) {
      if (a) buf += ' ';
      append_real(buf, obs.position[a]);
    }
    for (float f : obs.feature) {
      buf += ' ';
      append_real(buf, f);
    }
    if (frame.has_labels) {
      buf += ' ';
      buf += std::to_string(obs.label.value_or(0));
    }
    buf += '\n';
  }
  out << buf;
}

void write_frame(const std::filesystem::path& path, const Frame& frame) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write frame file " + path.string());
  write_frame(out, frame);
  if (!out) throw IoError("failed writing frame file " + path.string());
}

std::vector<std::filesystem::path> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  const auto base = path.parent_path();
  std::vector<std::filesystem::path> frames;
  std::string line;
  while (std::getline(in, line)) {
    if (is_blank_or_comment(line)) continue;
    const auto tok = split_ws(line);
    std::filesystem::path p(std::string(tok.front()));
    frames.push_back(p.is_absolute() ? p : base / p);
  }
  return frames;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<std::filesystem::path>& frames) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + path.string());
  for (const auto& f : frames) out << f.generic_string() << '\n';
}

}  // namespace fawcon
