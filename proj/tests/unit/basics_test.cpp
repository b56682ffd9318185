// Copyright 2026 The imgslim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "imgslim/digest.hpp"
#include "imgslim/error.hpp"
#include "imgslim/gzip.hpp"
#include "imgslim/path.hpp"
#include "imgslim/tar.hpp"

namespace imgslim {
namespace {

TEST(Path, NormalizeCollapsesDotsAndClampsAtRoot) {
  EXPECT_EQ(vpath::normalize("usr//bin/./sh"), "/usr/bin/sh");
  EXPECT_EQ(vpath::normalize("/usr/bin/../lib/"), "/usr/lib");
  EXPECT_EQ(vpath::normalize("/../../etc"), "/etc");
  EXPECT_EQ(vpath::normalize(""), "/");
}

TEST(Path, JoinParentBasename) {
  EXPECT_EQ(vpath::join("/usr/bin", "sh"), "/usr/bin/sh");
  EXPECT_EQ(vpath::join("/usr/bin", "/etc/passwd"), "/etc/passwd");
  EXPECT_EQ(vpath::parent("/usr/bin/sh"), "/usr/bin");
  EXPECT_EQ(vpath::parent("/usr"), "/");
  EXPECT_EQ(vpath::parent("/"), "/");
  EXPECT_EQ(vpath::basename("/usr/bin/sh"), "sh");
}

TEST(Path, AncestorsAndPrefixes) {
  EXPECT_EQ(vpath::ancestors("/usr/bin/sh"), (std::vector<std::string>{"/usr", "/usr/bin"}));
  EXPECT_TRUE(vpath::ancestors("/etc").empty());
  EXPECT_TRUE(vpath::within("/usr/bin", "/usr/bin"));
  EXPECT_FALSE(vpath::strictly_within("/usr/bin", "/usr/bin"));
  EXPECT_TRUE(vpath::strictly_within("/usr/bin/X11", "/usr/bin"));
  EXPECT_FALSE(vpath::within("/usr/binutils", "/usr/bin"));
  EXPECT_EQ(vpath::replace_prefix("/usr/bin/sh", "/usr/bin", "/bin"), "/bin/sh");
}

TEST(Digest, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_digest("abc"),
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Digest, VerifyAndParse) {
  EXPECT_NO_THROW(verify_digest("abc", sha256_digest("abc"), "blob"));
  EXPECT_THROW(verify_digest("abd", sha256_digest("abc"), "blob"), IntegrityError);
  EXPECT_THROW(parse_digest("sha256"), FormatError);
  EXPECT_THROW(verify_digest("abc", "md5:abcd", "blob"), UnsupportedFormatError);
  EXPECT_THROW(parse_digest("sha256:XYZ"), FormatError);
  auto parts = parse_digest(sha256_digest("x"));
  EXPECT_EQ(parts.algorithm, "sha256");
  EXPECT_EQ(parts.encoded.size(), 64u);
}

TEST(Gzip, RoundTrip) {
  std::string data(100000, 'a');
  for (std::size_t i = 0; i < data.size(); i += 7) data[i] = static_cast<char>(i % 251);
  std::string gz = gzip_compress(data);
  EXPECT_TRUE(is_gzip(gz));
  EXPECT_FALSE(is_gzip(data));
  EXPECT_EQ(gzip_decompress(gz), data);
  EXPECT_EQ(gzip_compress(data), gz) << "compression must be deterministic";
}

TEST(Gzip, CorruptInputIsAFormatError) {
  std::string gz = gzip_compress("hello world, hello world");
  EXPECT_THROW(gzip_decompress(gz.substr(0, gz.size() / 2)), FormatError);
  std::string bad = gz;
  bad[12] ^= 0x55;
  EXPECT_THROW(gzip_decompress(bad), FormatError);
}

TEST(Tar, RoundTripsEntryTypes) {
  tar::Writer w;
  w.add(testing::dir_header("etc", 0750));
  w.add(testing::file_header("etc/hosts", 9, 0600), "127.0.0.1");
  w.add(testing::symlink_header("etc/localtime", "/usr/share/zoneinfo/UTC"));
  w.add(testing::hardlink_header("etc/hosts2", "etc/hosts"));
  std::string archive = w.finish();
  EXPECT_EQ(archive.size() % 512, 0u);

  auto entries = tar::read(archive);
  ASSERT_EQ(entries.size(), 4u);
  EXPECT_EQ(entries[0].header.type, tar::EntryType::kDirectory);
  EXPECT_EQ(entries[0].header.mode, 0750u);
  EXPECT_EQ(entries[1].header.name, "etc/hosts");
  EXPECT_EQ(tar::content(archive, entries[1]), "127.0.0.1");
  EXPECT_EQ(entries[2].header.type, tar::EntryType::kSymlink);
  EXPECT_EQ(entries[2].header.link_name, "/usr/share/zoneinfo/UTC");
  EXPECT_EQ(entries[3].header.type, tar::EntryType::kHardlink);
  EXPECT_EQ(entries[3].header.link_name, "etc/hosts");
}

TEST(Tar, LongNamesAndTargetsSurvive) {
  std::string deep;
  for (int i = 0; i < 30; ++i) deep += "directory" + std::to_string(i) + "/";
  deep += "file.txt";
  std::string target(300, 't');
  tar::Writer w;
  w.add(testing::file_header(deep, 3), "abc");
  w.add(testing::symlink_header("link", target));
  std::string archive = w.finish();
  auto entries = tar::read(archive);
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].header.name, deep);
  EXPECT_EQ(tar::content(archive, entries[0]), "abc");
  EXPECT_EQ(entries[1].header.link_name, target);
}

TEST(Tar, DetectsCorruption) {
  tar::Writer w;
  w.add(testing::file_header("a.txt", 5), "hello");
  std::string archive = w.finish();
  std::string bad = archive;
  bad[0] = 'b';  // name byte changes, checksum no longer matches
  EXPECT_THROW(tar::read(bad), FormatError);
  std::string truncated = archive.substr(0, 512 + 2);
  EXPECT_THROW(tar::read(truncated), FormatError);
}

TEST(Tar, EmptyArchive) {
  tar::Writer w;
  std::string archive = w.finish();
  EXPECT_TRUE(tar::read(archive).empty());
  EXPECT_TRUE(tar::read("").empty());
}

}  // namespace
}  // namespace imgslim
