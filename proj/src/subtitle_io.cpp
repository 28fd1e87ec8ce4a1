// subdiar/subtitle_io.cpp

#include "subdiar/subtitle_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "subdiar/log.hpp"

namespace subdiar {

namespace {

std::string read_all(std::istream &in) {
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

std::vector<std::string> split_lines(std::string text) {
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB &&
      static_cast<unsigned char>(text[2]) == 0xBF) {
    text.erase(0, 3);
  }
  std::vector<std::string> lines;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
      lines.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\n') {
      lines.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(std::move(cur));
  return lines;
}

bool is_blank(const std::string &s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::string trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

const std::regex &timing_regex() {
  static const std::regex re(
      R"(^\s*(\d{2,}):(\d{2}):(\d{2}),(\d{3})\s*-->\s*(\d{2,}):(\d{2}):(\d{2}),(\d{3})\s*$)");
  return re;
}

std::int64_t to_ms(const std::smatch &m, int first, std::size_t line_no) {
  const std::int64_t h = std::stoll(m[first].str());
  const std::int64_t mi = std::stoll(m[first + 1].str());
  const std::int64_t s = std::stoll(m[first + 2].str());
  const std::int64_t ms = std::stoll(m[first + 3].str());
  if (mi >= 60 || s >= 60) {
    throw ParseError("line " + std::to_string(line_no) +
                     ": minutes/seconds out of range in timestamp");
  }
  return ((h * 60 + mi) * 60 + s) * 1000 + ms;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string csv_quote(const std::string &s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// RFC 4180 records; quoted fields may contain separators and newlines.
std::vector<std::vector<std::string>> parse_csv(const std::string &text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename T>
T parse_number(const std::string &s, const char *what) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(std::string("invalid ") + what + ": '" + s + "'");
  }
  return v;
}

std::string format_seconds(std::int64_t ms) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%lld.%03lld",
                static_cast<long long>(ms / 1000),
                static_cast<long long>(ms % 1000));
  return buf;
}

std::int64_t parse_seconds(const std::string &s, const char *what) {
  const double v = parse_number<double>(s, what);
  if (!std::isfinite(v)) throw ParseError(std::string("non-finite ") + what);
  return std::llround(v * 1000.0);
}

}  // namespace

Program parse_srt(std::istream &in, std::string program_id) {
  const std::vector<std::string> rows = split_lines(read_all(in));
  Program program;
  program.program_id = std::move(program_id);

  std::set<std::string> seen_indices;
  std::size_t i = 0;
  while (i < rows.size()) {
    if (is_blank(rows[i])) {
      ++i;
      continue;
    }
    const std::size_t block_start = i + 1;
    std::string index;
    if (rows[i].find("-->") == std::string::npos) {
      index = trim(rows[i]);
      if (index.empty() ||
          !std::all_of(index.begin(), index.end(),
                       [](unsigned char c) { return std::isdigit(c); })) {
        throw ParseError("line " + std::to_string(block_start) +
                         ": expected cue index or timestamp, got '" + rows[i] +
                         "'");
      }
      ++i;
      if (i >= rows.size() || is_blank(rows[i])) {
        throw ParseError("line " + std::to_string(block_start) +
                         ": cue index without timestamp");
      }
    }
    std::smatch m;
    if (!std::regex_match(rows[i], m, timing_regex())) {
      throw ParseError("line " + std::to_string(i + 1) +
                       ": malformed timestamp '" + rows[i] + "'");
    }
    Line line;
    line.start_ms = to_ms(m, 1, i + 1);
    line.end_ms = to_ms(m, 5, i + 1);
    if (line.end_ms <= line.start_ms) {
      throw ParseError("line " + std::to_string(i + 1) +
                       ": cue end is not after its start");
    }
    if (!index.empty() && !seen_indices.insert(index).second) {
      log_warning("duplicate SRT cue index " + index + " at line " +
                  std::to_string(block_start) + "; keeping both cues");
    }
    ++i;
    std::string text;
    bool first = true;
    while (i < rows.size() && !is_blank(rows[i])) {
      if (!first) text += '\n';
      text += rows[i];
      first = false;
      ++i;
    }
    line.text = std::move(text);
    program.lines.push_back(std::move(line));
  }

  std::stable_sort(program.lines.begin(), program.lines.end(),
                   [](const Line &a, const Line &b) {
                     return a.start_ms < b.start_ms;
                   });
  for (std::size_t k = 0; k < program.lines.size(); ++k) {
    program.lines[k].line_id = static_cast<int>(k);
  }
  return program;
}

Program parse_srt_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open subtitle file: " + path);
  std::string id = path;
  if (auto slash = id.find_last_of('/'); slash != std::string::npos) {
    id = id.substr(slash + 1);
  }
  if (auto dot = id.find_last_of('.'); dot != std::string::npos && dot > 0) {
    id = id.substr(0, dot);
  }
  return parse_srt(in, id);
}

std::string format_srt_time(std::int64_t ms) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%02lld:%02lld:%02lld,%03lld",
                static_cast<long long>(ms / 3600000),
                static_cast<long long>((ms / 60000) % 60),
                static_cast<long long>((ms / 1000) % 60),
                static_cast<long long>(ms % 1000));
  return buf;
}

void write_srt(const Program &program, std::ostream &out) {
  for (std::size_t k = 0; k < program.lines.size(); ++k) {
    const Line &l = program.lines[k];
    if (k) out << '\n';
    out << (k + 1) << '\n'
        << format_srt_time(l.start_ms) << " --> " << format_srt_time(l.end_ms)
        << '\n';
    if (!l.text.empty()) out << l.text << '\n';
  }
}

void write_annotation(const Program &program,
                      std::span<const Assignment> assignments,
                      std::ostream &out) {
  if (assignments.size() != program.lines.size()) {
    throw std::invalid_argument("annotation needs one assignment per line");
  }
  std::vector<const Assignment *> by_line(program.lines.size(), nullptr);
  for (const Assignment &a : assignments) {
    if (a.line_id < 0 || static_cast<std::size_t>(a.line_id) >= by_line.size() ||
        by_line[a.line_id] != nullptr) {
      throw std::invalid_argument("assignment line_id out of range or repeated: " +
                                  std::to_string(a.line_id));
    }
    by_line[a.line_id] = &a;
  }
  out << kAnnotationHeader << '\n';
  for (const Line &l : program.lines) {
    const Assignment &a = *by_line[l.line_id];
    out << l.line_id << ',' << l.start_ms << ',' << l.end_ms << ','
        << a.speaker.id << ',' << to_string(a.speaker.origin) << ','
        << to_string(a.stage) << ',' << format_double(a.confidence) << ','
        << csv_quote(l.text) << '\n';
  }
  if (!out) throw std::runtime_error("annotation write failed");
}

std::vector<AnnotationRecord> parse_annotation(std::istream &in) {
  auto rows = parse_csv(read_all(in));
  if (rows.empty()) throw ParseError("annotation file has no header");
  std::string header;
  for (std::size_t k = 0; k < rows[0].size(); ++k) {
    if (k) header += ',';
    header += rows[0][k];
  }
  if (header != kAnnotationHeader) {
    throw ParseError("unexpected annotation header: " + header);
  }
  std::vector<AnnotationRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto &f = rows[r];
    if (f.size() != 8) {
      throw ParseError("annotation row " + std::to_string(r) + " has " +
                       std::to_string(f.size()) + " fields, expected 8");
    }
    AnnotationRecord rec;
    rec.line.line_id = parse_number<int>(f[0], "line_id");
    rec.line.start_ms = parse_number<std::int64_t>(f[1], "start_ms");
    rec.line.end_ms = parse_number<std::int64_t>(f[2], "end_ms");
    rec.line.text = f[7];
    rec.assignment.line_id = rec.line.line_id;
    rec.assignment.speaker.id = parse_number<int>(f[3], "speaker_id");
    try {
      rec.assignment.speaker.origin = origin_from_string(f[4]);
      rec.assignment.stage = stage_from_string(f[5]);
    } catch (const std::invalid_argument &e) {
      throw ParseError(e.what());
    }
    rec.assignment.confidence = parse_number<double>(f[6], "confidence");
    out.push_back(std::move(rec));
  }
  return out;
}

std::string speaker_label(const SpeakerId &s) {
  return "spk" + std::to_string(s.id);
}

std::vector<RttmRecord> rttm_records(const Program &program,
                                     std::span<const Assignment> assignments,
                                     const std::string &file_id) {
  std::vector<const Assignment *> by_line(program.lines.size(), nullptr);
  for (const Assignment &a : assignments) {
    if (a.line_id >= 0 && static_cast<std::size_t>(a.line_id) < by_line.size()) {
      by_line[a.line_id] = &a;
    }
  }
  std::vector<RttmRecord> out;
  out.reserve(program.lines.size());
  for (const Line &l : program.lines) {
    if (!by_line[l.line_id]) {
      throw std::invalid_argument("no assignment for line " +
                                  std::to_string(l.line_id));
    }
    out.push_back(RttmRecord{file_id, l.start_ms, l.duration_ms(),
                             speaker_label(by_line[l.line_id]->speaker)});
  }
  return out;
}

std::string format_rttm(std::span<const RttmRecord> records) {
  std::string out;
  for (const RttmRecord &r : records) {
    out += "SPEAKER " + r.file_id + " 1 " + format_seconds(r.onset_ms) + " " +
           format_seconds(r.duration_ms) + " <NA> <NA> " + r.speaker_label +
           " <NA> <NA>\n";
  }
  return out;
}

std::string write_rttm(const Program &program,
                       std::span<const Assignment> assignments,
                       const std::string &file_id) {
  return format_rttm(rttm_records(program, assignments, file_id));
}

std::vector<RttmRecord> parse_rttm(std::istream &in) {
  std::vector<RttmRecord> out;
  std::string row;
  std::size_t line_no = 0;
  while (std::getline(in, row)) {
    ++line_no;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (is_blank(row) || row.rfind(";;", 0) == 0) continue;
    std::istringstream fields(row);
    std::vector<std::string> f{std::istream_iterator<std::string>(fields),
                               std::istream_iterator<std::string>()};
    const std::string where = "rttm line " + std::to_string(line_no) + ": ";
    if (f.size() != 10) {
      throw ParseError(where + "expected 10 fields, got " +
                       std::to_string(f.size()));
    }
    if (f[0] != "SPEAKER") throw ParseError(where + "unsupported record type " + f[0]);
    RttmRecord rec;
    rec.file_id = f[1];
    rec.onset_ms = parse_seconds(f[3], "onset");
    rec.duration_ms = parse_seconds(f[4], "duration");
    rec.speaker_label = f[7];
    if (rec.onset_ms < 0) throw ParseError(where + "negative onset");
    if (rec.duration_ms <= 0) throw ParseError(where + "non-positive duration");
    out.push_back(std::move(rec));
  }
  return out;
}

GroundTruth parse_ground_truth(std::istream &in) {
  auto rows = parse_csv(read_all(in));
  if (rows.empty() || rows[0].size() != 2 || rows[0][0] != "line_id" ||
      rows[0][1] != "speaker") {
    throw ParseError("ground truth must start with header 'line_id,speaker'");
  }
  std::vector<std::optional<std::string>> labels(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) {
      throw ParseError("ground truth row " + std::to_string(r) +
                       " must have 2 fields");
    }
    const int id = parse_number<int>(rows[r][0], "line_id");
    if (id < 0 || static_cast<std::size_t>(id) >= labels.size() || labels[id]) {
      throw ParseError("ground truth line_id " + rows[r][0] +
                       " out of range or repeated");
    }
    labels[id] = rows[r][1];
  }
  GroundTruth truth;
  truth.labels.reserve(labels.size());
  for (auto &l : labels) truth.labels.push_back(std::move(*l));
  return truth;
}

GroundTruth parse_ground_truth_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open ground truth file: " + path);
  return parse_ground_truth(in);
}

void write_ground_truth(const GroundTruth &truth, std::ostream &out) {
  out << "line_id,speaker\n";
  for (std::size_t k = 0; k < truth.labels.size(); ++k) {
    out << k << ',' << csv_quote(truth.labels[k]) << '\n';
  }
}

}  // namespace subdiar
