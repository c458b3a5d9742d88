#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "sgn/error.hpp"
#include "sgn/io/canonical.hpp"
#include "sgn/io/ntu.hpp"
#include "sgn/io/protocol.hpp"

using namespace sgn;

namespace {

const std::filesystem::path kFixtures = SGN_FIXTURE_DIR;

std::vector<SkeletonSequence> parse_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  return parse_ntu_skeleton(in, p.stem().string(), "ntu60");
}

SkeletonSequence record(int subject, int camera, int setup, const std::string& source, int label = 0) {
  SkeletonSequence s;
  s.frames = 1;
  s.joints = 1;
  s.coords = {0.1f, 0.2f, 0.3f};
  s.label = label;
  s.subject_id = subject;
  s.camera_id = camera;
  s.setup_id = setup;
  s.dataset = "ntu60";
  s.source = source;
  return s;
}

}  // namespace

TEST(NtuParser, SingleZeroBody) {
  auto seqs = parse_file(kFixtures / "ntu/S001C001P001R001A001.skeleton");
  ASSERT_EQ(seqs.size(), 1u);
  EXPECT_EQ(seqs[0].frames, 1u);
  EXPECT_EQ(seqs[0].joints, 25u);
  for (float c : seqs[0].coords) EXPECT_EQ(c, 0.0f);
  EXPECT_TRUE(is_ghost(seqs[0]));
}

TEST(NtuParser, TwoBodiesThreeFrames) {
  auto seqs = parse_file(kFixtures / "ntu/S001C002P003R002A060.skeleton");
  ASSERT_EQ(seqs.size(), 2u);
  for (const auto& s : seqs) {
    EXPECT_EQ(s.frames, 3u);
    EXPECT_EQ(s.label, 59);
    EXPECT_EQ(s.source, "S001C002P003R002A060");
  }
  EXPECT_EQ(seqs[0].body_id, 0);
  EXPECT_EQ(seqs[1].body_id, 1);
}

TEST(NtuParser, AbsentBodyShortensSequence) {
  auto seqs = parse_file(kFixtures / "ntu/S002C003P008R001A013.skeleton");
  ASSERT_EQ(seqs.size(), 1u);
  EXPECT_EQ(seqs[0].frames, 4u);
}

TEST(NtuParser, NameDecode) {
  auto n = decode_ntu_name("S001C002P003R002A060");
  ASSERT_TRUE(n);
  EXPECT_EQ(n->setup, 1);
  EXPECT_EQ(n->camera, 2);
  EXPECT_EQ(n->subject, 3);
  EXPECT_EQ(n->label(), 59);
  EXPECT_FALSE(decode_ntu_name("not_a_clip"));
}

TEST(NtuParser, CorruptFieldReportsLine) {
  try {
    parse_file(kFixtures / "corrupt/S001C001P002R001A002.skeleton");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 9u);
    EXPECT_NE(std::string(e.what()).find("abc"), std::string::npos);
  }
}

TEST(NtuParser, TruncatedFile) {
  std::istringstream in("2\n1\n0 0 0 0 0 0 0 0 0 0\n1\n0 0 0\n");
  EXPECT_THROW(parse_ntu_skeleton(in, "", "ntu60"), ParseError);
}

TEST(NtuParser, JointCountChangeIsError) {
  std::istringstream in("2\n1\nb\n1\n0 0 0\n1\nb\n2\n0 0 0\n0 0 0\n");
  try {
    parse_ntu_skeleton(in, "", "ntu60");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 8u);
  }
}

TEST(Canonical, RoundTripIsExact) {
  std::vector<SkeletonSequence> all;
  for (auto name : {"S001C001P001R001A001", "S001C002P003R002A060", "S002C003P008R001A013"}) {
    for (auto& s : parse_file(kFixtures / "ntu" / (std::string(name) + ".skeleton"))) all.push_back(s);
  }
  all[1].coords[4] = 1.0f / 3.0f;  // a value with no short decimal form
  std::ostringstream out;
  write_canonical_header(out);
  for (const auto& s : all) out << write_canonical(s) << '\n';
  std::istringstream in(out.str());
  EXPECT_EQ(load_canonical(in), all);
}

TEST(Canonical, EmptyStream) {
  std::istringstream in("");
  EXPECT_TRUE(load_canonical(in).empty());
}

TEST(Canonical, CorruptCoordinateCountNamesRecord) {
  auto s = record(1, 1, 1, "a");
  const std::string short_line = "1\tntu60\t0\t1\t1\t1\t0\t1\t1\t0.1\t0.2\tsrc";
  std::istringstream in(std::string(kCanonicalMagic) + " " + std::to_string(kCanonicalVersion) + "\n" +
                        write_canonical(s) + "\n" + short_line + "\n");
  try {
    load_canonical(in);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("record 1"), std::string::npos) << e.what();
  }
}

TEST(Canonical, SchemaVersionMismatch) {
  std::istringstream in(std::string(kCanonicalMagic) + " 99\n");
  EXPECT_THROW(load_canonical(in), SchemaError);
}

TEST(Protocol, CrossSubjectTrainSubject) {
  std::vector<SkeletonSequence> recs{record(1, 1, 1, "a"), record(2, 1, 1, "b")};
  IdLists ids{{1}, {}};
  auto m = split_protocol(recs, Protocol::cross_subject, ids, {});
  EXPECT_EQ(m.assignment[0], Split::train);
  EXPECT_EQ(m.assignment[1], Split::test);
}

TEST(Protocol, CrossViewCameraOneIsTest) {
  std::vector<SkeletonSequence> recs{record(1, 1, 1, "a"), record(1, 2, 1, "b"), record(1, 3, 1, "c")};
  auto m = split_protocol(recs, Protocol::cross_view, default_id_lists("ntu60", Protocol::cross_view), {});
  EXPECT_EQ(m.assignment[0], Split::test);
  EXPECT_EQ(m.assignment[1], Split::train);
  EXPECT_EQ(m.assignment[2], Split::train);
}

TEST(Protocol, ValidationCarveOutIsExactAndSeeded) {
  std::vector<SkeletonSequence> recs;
  for (int i = 0; i < 100; ++i) recs.push_back(record(1, 1, 1, "clip" + std::to_string(i)));
  SplitOptions opt;
  opt.validation_fraction = 0.1;
  opt.seed = 42;
  auto a = split_protocol(recs, Protocol::cross_subject, {{1}, {}}, opt);
  auto b = split_protocol(recs, Protocol::cross_subject, {{1}, {}}, opt);
  EXPECT_EQ(a.count(Split::val), 10u);
  EXPECT_EQ(a.count(Split::train), 90u);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.digest(recs), b.digest(recs));
  opt.seed = 43;
  EXPECT_NE(split_protocol(recs, Protocol::cross_subject, {{1}, {}}, opt).assignment, a.assignment);
}

TEST(Protocol, BodiesOfOneClipStayTogether) {
  std::vector<SkeletonSequence> recs;
  for (int i = 0; i < 30; ++i) {
    recs.push_back(record(1, 1, 1, "clip" + std::to_string(i)));
    recs.push_back(record(1, 1, 1, "clip" + std::to_string(i)));
    recs.back().body_id = 1;
  }
  SplitOptions opt;
  opt.validation_fraction = 0.2;
  auto m = split_protocol(recs, Protocol::cross_subject, {{1}, {}}, opt);
  for (std::size_t i = 0; i < recs.size(); i += 2) EXPECT_EQ(m.assignment[i], m.assignment[i + 1]);
}

TEST(Protocol, IdOnNeitherSideIsProtocolError) {
  std::vector<SkeletonSequence> recs{record(5, 1, 1, "a")};
  EXPECT_THROW(split_protocol(recs, Protocol::cross_subject, {{1}, {2}}, {}), ProtocolError);
}

TEST(Protocol, SameSubjectHalvesEachClass) {
  std::vector<SkeletonSequence> recs;
  for (int i = 0; i < 8; ++i) recs.push_back(record(1, 1, 1, "c" + std::to_string(i), i % 2));
  auto m = split_protocol(recs, Protocol::same_subject, {}, {});
  EXPECT_EQ(m.count(Split::train), 4u);
  EXPECT_EQ(m.count(Split::test), 4u);
}

TEST(Protocol, NameParsing) {
  EXPECT_EQ(parse_protocol("cross-setup"), Protocol::cross_setup);
  EXPECT_THROW(parse_protocol("xsub"), ConfigError);
}
