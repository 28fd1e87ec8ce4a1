#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "subdiar/log.hpp"
#include "subdiar/subtitle_io.hpp"

using namespace subdiar;

namespace {

Program parse(const std::string &text) {
  std::istringstream in(text);
  return parse_srt(in, "p");
}

}  // namespace

TEST_CASE("parse_srt: empty stream has no lines") {
  CHECK(parse("").lines.empty());
  CHECK(parse("\n\n  \n").lines.empty());
}

TEST_CASE("parse_srt: single cue") {
  const Program p = parse("1\n00:00:01,000 --> 00:00:02,500\nHello\n");
  REQUIRE(p.lines.size() == 1);
  CHECK(p.program_id == "p");
  CHECK(p.lines[0] == Line{0, 1000, 2500, "Hello"});
  CHECK(p.lines[0].duration_ms() == 1500);
}

TEST_CASE("parse_srt: BOM, CRLF, multi-line text, missing index") {
  const Program p = parse(
      "\xEF\xBB\xBF" "1\r\n00:00:01,000 --> 00:00:02,000\r\nfirst\r\nsecond\r\n\r\n"
      "00:01:00,250 --> 01:00:00,000\r\nthird\r\n");
  REQUIRE(p.lines.size() == 2);
  CHECK(p.lines[0].text == "first\nsecond");
  CHECK(p.lines[1].start_ms == 60250);
  CHECK(p.lines[1].end_ms == 3600000);
}

TEST_CASE("parse_srt: lines sorted by start and renumbered") {
  const Program p = parse(
      "1\n00:00:05,000 --> 00:00:06,000\nlate\n\n"
      "2\n00:00:01,000 --> 00:00:02,000\nearly\n\n"
      "3\n00:00:05,000 --> 00:00:07,000\nlate tie\n");
  REQUIRE(p.lines.size() == 3);
  CHECK(p.lines[0].text == "early");
  CHECK(p.lines[1].text == "late");
  CHECK(p.lines[2].text == "late tie");
  for (int k = 0; k < 3; ++k) CHECK(p.lines[k].line_id == k);
}

TEST_CASE("parse_srt: duplicate index warns and keeps both") {
  std::vector<std::string> warnings;
  auto old = set_warning_sink([&](const std::string &m) { warnings.push_back(m); });
  const Program p = parse(
      "1\n00:00:01,000 --> 00:00:02,000\na\n\n1\n00:00:03,000 --> 00:00:04,000\nb\n");
  set_warning_sink(old);
  CHECK(p.lines.size() == 2);
  CHECK(warnings.size() == 1);
}

TEST_CASE("parse_srt: malformed input is rejected") {
  CHECK_THROWS_AS(parse("1\n00:00:02,000 --> 00:00:01,000\nbackwards\n"), ParseError);
  CHECK_THROWS_AS(parse("1\n00:00:01,000 --> 00:00:01,000\nempty\n"), ParseError);
  CHECK_THROWS_AS(parse("1\n00:00:01.000 --> 00:00:02,000\ndot\n"), ParseError);
  CHECK_THROWS_AS(parse("1\n00:61:01,000 --> 00:62:02,000\nminutes\n"), ParseError);
  CHECK_THROWS_AS(parse("1\n00:00:75,000 --> 00:00:76,000\nseconds\n"), ParseError);
  CHECK_THROWS_AS(parse("1\n0:00:01,000 --> 00:00:02,000\nshort hours\n"), ParseError);
  CHECK_THROWS_AS(parse("1\n00:00:01,00 --> 00:00:02,000\nshort ms\n"), ParseError);
  CHECK_THROWS_AS(parse("x1\n00:00:01,000 --> 00:00:02,000\nbad index\n"), ParseError);
  CHECK_THROWS_AS(parse("1\n"), ParseError);
}

TEST_CASE("srt time formatting and write/parse round trip") {
  CHECK(format_srt_time(0) == "00:00:00,000");
  CHECK(format_srt_time(3723004) == "01:02:03,004");
  Program p{"x", {{0, 1000, 2500, "one"}, {1, 3000, 4000, "two\nlines"}}};
  std::ostringstream os;
  write_srt(p, os);
  std::istringstream in(os.str());
  const Program back = parse_srt(in, "x");
  CHECK(back.lines == p.lines);
}

TEST_CASE("annotation: header only for an empty program") {
  std::ostringstream os;
  write_annotation(Program{"e", {}}, {}, os);
  CHECK(os.str() == std::string(kAnnotationHeader) + "\n");
}

TEST_CASE("annotation: write then parse yields identical assignments") {
  Program p{"x", {{0, 0, 1000, "plain"}, {1, 1000, 2000, "with, comma and \"quotes\""},
                  {2, 2500, 3000, "two\nlines"}}};
  std::vector<Assignment> a{
      {0, {0, Origin::visual_anchor}, 1.0, Stage::active_visual},
      {1, {0, Origin::visual_anchor}, 0.123456789012345, Stage::prototype_nearest},
      {2, {7, Origin::supplemented}, -0.25, Stage::supplemented}};
  std::ostringstream os;
  write_annotation(p, a, os);
  std::istringstream in(os.str());
  const auto records = parse_annotation(in);
  REQUIRE(records.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(records[k].line == p.lines[k]);
    CHECK(records[k].assignment == a[k]);
  }
}

TEST_CASE("annotation: needs exactly one assignment per line") {
  Program p{"x", {{0, 0, 1000, "a"}, {1, 1000, 2000, "b"}}};
  std::ostringstream os;
  std::vector<Assignment> one{{0, {1, Origin::visual_anchor}, 1.0, Stage::active_visual}};
  CHECK_THROWS_AS(write_annotation(p, one, os), std::invalid_argument);
  std::vector<Assignment> dup{one[0], one[0]};
  CHECK_THROWS_AS(write_annotation(p, dup, os), std::invalid_argument);
}

TEST_CASE("annotation: malformed files are rejected") {
  std::istringstream no_header("");
  CHECK_THROWS_AS(parse_annotation(no_header), ParseError);
  std::istringstream wrong_header("a,b\n");
  CHECK_THROWS_AS(parse_annotation(wrong_header), ParseError);
  std::istringstream short_row(std::string(kAnnotationHeader) + "\n0,0,1000,1\n");
  CHECK_THROWS_AS(parse_annotation(short_row), ParseError);
  std::istringstream open_quote(std::string(kAnnotationHeader) +
                                "\n0,0,1000,1,visual_anchor,active_visual,1,\"abc\n");
  CHECK_THROWS_AS(parse_annotation(open_quote), ParseError);
}

TEST_CASE("rttm: hand formatted record") {
  Program p{"p", {{0, 1000, 2500, "x"}}};
  std::vector<Assignment> a{{0, {3, Origin::visual_anchor}, 1.0, Stage::active_visual}};
  CHECK(write_rttm(p, a, "p") == "SPEAKER p 1 1.000 1.500 <NA> <NA> spk3 <NA> <NA>\n");
}

TEST_CASE("rttm: parse(write(x)) == x") {
  std::vector<RttmRecord> recs{{"f", 0, 1, "spk1"}, {"f", 1234, 56789, "spk22"},
                               {"f", 3600000, 999, "spk1"}};
  const std::string text = format_rttm(recs);
  std::istringstream in(";; comment\n\n" + text);
  CHECK(parse_rttm(in) == recs);
  CHECK(recs[1].onset() == doctest::Approx(1.234));
  CHECK(recs[1].duration() == doctest::Approx(56.789));
}

TEST_CASE("rttm: malformed records are rejected") {
  std::istringstream eight("SPEAKER f 1 0.000 1.000 <NA> <NA> spk1\n");
  CHECK_THROWS_AS(parse_rttm(eight), ParseError);
  std::istringstream type("LEXEME f 1 0.000 1.000 <NA> <NA> spk1 <NA> <NA>\n");
  CHECK_THROWS_AS(parse_rttm(type), ParseError);
  std::istringstream neg("SPEAKER f 1 -1.000 1.000 <NA> <NA> spk1 <NA> <NA>\n");
  CHECK_THROWS_AS(parse_rttm(neg), ParseError);
  std::istringstream zero("SPEAKER f 1 1.000 0.000 <NA> <NA> spk1 <NA> <NA>\n");
  CHECK_THROWS_AS(parse_rttm(zero), ParseError);
  std::istringstream text("SPEAKER f 1 abc 1.000 <NA> <NA> spk1 <NA> <NA>\n");
  CHECK_THROWS_AS(parse_rttm(text), ParseError);
}

TEST_CASE("ground truth round trip and validation") {
  const GroundTruth gt{{"alice", "bob", "alice"}};
  std::ostringstream os;
  write_ground_truth(gt, os);
  std::istringstream in(os.str());
  CHECK(parse_ground_truth(in) == gt);

  std::istringstream unordered("line_id,speaker\n1,b\n0,a\n");
  CHECK(parse_ground_truth(unordered) == GroundTruth{{"a", "b"}});
  std::istringstream gap("line_id,speaker\n0,a\n2,b\n");
  CHECK_THROWS_AS(parse_ground_truth(gap), ParseError);
  std::istringstream dup("line_id,speaker\n0,a\n0,b\n");
  CHECK_THROWS_AS(parse_ground_truth(dup), ParseError);
  std::istringstream header("id,who\n0,a\n");
  CHECK_THROWS_AS(parse_ground_truth(header), ParseError);
}
