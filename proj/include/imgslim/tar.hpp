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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

// Minimal ustar/pax/GNU tar codec over in-memory buffers.
namespace imgslim::tar {

enum class EntryType {
  kRegular,
  kHardlink,
  kSymlink,
  kCharDevice,
  kBlockDevice,
  kDirectory,
  kFifo,
  kUnknown,
};

struct Header {
  std::string name;
  EntryType type = EntryType::kRegular;
  char typeflag = '0';
  std::string link_name;
  std::uint32_t mode = 0644;
  std::uint64_t uid = 0;
  std::uint64_t gid = 0;
  std::int64_t mtime = 0;
  std::string uname;
  std::string gname;
  std::uint32_t devmajor = 0;
  std::uint32_t devminor = 0;
  std::uint64_t size = 0;
  // pax records we do not interpret ourselves (xattrs, ctime, ...); carried
  // through verbatim when the entry is rewritten.
  std::map<std::string, std::string> extra_pax;
};

struct Entry {
  Header header;
  // Byte range of the member's content inside the archive buffer.
  std::size_t data_offset = 0;
};

// Parses every member of `archive`. Long names (pax or GNU) are folded into
// the header; pax/GNU meta members never appear in the result. Throws
// FormatError on checksum mismatch or truncation.
std::vector<Entry> read(std::string_view archive);

inline std::string_view content(std::string_view archive, const Entry& e) {
  return archive.substr(e.data_offset, e.header.size);
}

// Writes a deterministic archive: ustar headers, pax extension headers only
// when a field does not fit.
class Writer {
 public:
  void add(const Header& header, std::string_view data = {});
  // Appends the end-of-archive marker and returns the bytes.
  std::string finish();

  std::size_t entry_count() const { return count_; }

 private:
  void write_block_header(const Header& header, char typeflag,
                          std::string_view name, std::string_view prefix,
                          std::string_view link, std::uint64_t size);
  void pad();

  std::string out_;
  std::size_t count_ = 0;
};

char typeflag_for(EntryType type);

}  // namespace imgslim::tar
