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

#include "imgslim/tar.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>

#include "imgslim/error.hpp"

namespace imgslim::tar {

namespace {

constexpr std::size_t kBlock = 512;

// ustar field offsets/lengths.
struct Field {
  std::size_t off;
  std::size_t len;
};
constexpr Field kName{0, 100};
constexpr Field kMode{100, 8};
constexpr Field kUid{108, 8};
constexpr Field kGid{116, 8};
constexpr Field kSize{124, 12};
constexpr Field kMtime{136, 12};
constexpr Field kChksum{148, 8};
constexpr Field kTypeflag{156, 1};
constexpr Field kLinkname{157, 100};
constexpr Field kMagic{257, 6};
constexpr Field kVersion{263, 2};
constexpr Field kUname{265, 32};
constexpr Field kGname{297, 32};
constexpr Field kDevmajor{329, 8};
constexpr Field kDevminor{337, 8};
constexpr Field kPrefix{345, 155};

std::string_view field(std::string_view block, Field f) {
  return block.substr(f.off, f.len);
}

std::string cstr(std::string_view raw) {
  auto nul = raw.find('\0');
  return std::string(raw.substr(0, nul));
}

std::uint64_t parse_number(std::string_view raw, std::string_view what) {
  if (!raw.empty() && (static_cast<unsigned char>(raw[0]) & 0x80) != 0) {
    // GNU base-256: big-endian, high bit of the first byte is the marker.
    std::uint64_t v = static_cast<unsigned char>(raw[0]) & 0x7f;
    for (std::size_t i = 1; i < raw.size(); ++i) {
      v = (v << 8) | static_cast<unsigned char>(raw[i]);
    }
    return v;
  }
  std::uint64_t v = 0;
  bool any = false;
  for (char c : raw) {
    if (c == '\0' || c == ' ') {
      if (any) break;
      continue;
    }
    if (c < '0' || c > '7') {
      throw FormatError("tar: invalid octal in " + std::string(what) + " field");
    }
    v = (v << 3) | static_cast<std::uint64_t>(c - '0');
    any = true;
  }
  return v;
}

EntryType type_from_flag(char flag) {
  switch (flag) {
    case '0':
    case '\0':
    case '7':
      return EntryType::kRegular;
    case '1':
      return EntryType::kHardlink;
    case '2':
      return EntryType::kSymlink;
    case '3':
      return EntryType::kCharDevice;
    case '4':
      return EntryType::kBlockDevice;
    case '5':
      return EntryType::kDirectory;
    case '6':
      return EntryType::kFifo;
    default:
      return EntryType::kUnknown;
  }
}

bool is_zero_block(std::string_view block) {
  return std::all_of(block.begin(), block.end(), [](char c) { return c == 0; });
}

void verify_checksum(std::string_view block, std::size_t at) {
  auto stored = parse_number(field(block, kChksum), "chksum");
  std::uint64_t unsigned_sum = 0;
  std::int64_t signed_sum = 0;
  for (std::size_t i = 0; i < kBlock; ++i) {
    bool in_chksum = i >= kChksum.off && i < kChksum.off + kChksum.len;
    unsigned char u = in_chksum ? ' ' : static_cast<unsigned char>(block[i]);
    signed char s = in_chksum ? ' ' : static_cast<signed char>(block[i]);
    unsigned_sum += u;
    signed_sum += s;
  }
  if (stored != unsigned_sum && static_cast<std::int64_t>(stored) != signed_sum) {
    throw FormatError("tar: header checksum mismatch at offset " +
                      std::to_string(at));
  }
}

// Applies pax records to `h`. Unknown keys are kept for round-tripping.
void apply_pax(std::string_view data, Header& h, bool* size_set) {
  std::size_t pos = 0;
  while (pos < data.size()) {
    auto space = data.find(' ', pos);
    if (space == std::string_view::npos) break;
    std::size_t len = 0;
    auto [ptr, ec] = std::from_chars(data.data() + pos, data.data() + space, len);
    if (ec != std::errc() || len == 0 || pos + len > data.size()) {
      throw FormatError("tar: malformed pax record");
    }
    std::string_view record = data.substr(space + 1, pos + len - space - 2);
    auto eq = record.find('=');
    if (eq == std::string_view::npos) throw FormatError("tar: malformed pax record");
    std::string key(record.substr(0, eq));
    std::string value(record.substr(eq + 1));
    if (key == "path") {
      h.name = value;
    } else if (key == "linkpath") {
      h.link_name = value;
    } else if (key == "size") {
      h.size = std::stoull(value);
      if (size_set) *size_set = true;
    } else if (key == "uid") {
      h.uid = std::stoull(value);
    } else if (key == "gid") {
      h.gid = std::stoull(value);
    } else if (key == "uname") {
      h.uname = value;
    } else if (key == "gname") {
      h.gname = value;
    } else if (key == "mtime") {
      // Sub-second precision is dropped; the ustar field has none either.
      h.mtime = std::stoll(value.substr(0, value.find('.')));
    } else if (key == "atime" || key == "ctime") {
      // Access/change times are not preserved.
    } else {
      h.extra_pax[key] = value;
    }
    pos += len;
  }
}

}  // namespace

char typeflag_for(EntryType type) {
  switch (type) {
    case EntryType::kRegular:
      return '0';
    case EntryType::kHardlink:
      return '1';
    case EntryType::kSymlink:
      return '2';
    case EntryType::kCharDevice:
      return '3';
    case EntryType::kBlockDevice:
      return '4';
    case EntryType::kDirectory:
      return '5';
    case EntryType::kFifo:
      return '6';
    case EntryType::kUnknown:
      break;
  }
  return '0';
}

std::vector<Entry> read(std::string_view archive) {
  std::vector<Entry> entries;
  Header pending;  // pax/GNU overrides for the next real member
  bool have_pending = false;
  bool pending_size = false;
  std::map<std::string, std::string> global_pax;
  std::string gnu_longname;
  std::string gnu_longlink;

  std::size_t pos = 0;
  while (pos + kBlock <= archive.size()) {
    std::string_view block = archive.substr(pos, kBlock);
    if (is_zero_block(block)) break;
    verify_checksum(block, pos);

    Header h;
    char flag = field(block, kTypeflag)[0];
    h.typeflag = flag;
    h.type = type_from_flag(flag);
    h.name = cstr(field(block, kName));
    std::string magic = cstr(field(block, kMagic));
    std::string_view version = field(block, kVersion);
    bool posix_ustar = magic == "ustar" && version == "00";
    if (posix_ustar) {
      std::string prefix = cstr(field(block, kPrefix));
      if (!prefix.empty()) h.name = prefix + "/" + h.name;
    }
    h.link_name = cstr(field(block, kLinkname));
    h.mode = static_cast<std::uint32_t>(parse_number(field(block, kMode), "mode") & 07777);
    h.uid = parse_number(field(block, kUid), "uid");
    h.gid = parse_number(field(block, kGid), "gid");
    h.size = parse_number(field(block, kSize), "size");
    h.mtime = static_cast<std::int64_t>(parse_number(field(block, kMtime), "mtime"));
    if (magic.rfind("ustar", 0) == 0) {
      h.uname = cstr(field(block, kUname));
      h.gname = cstr(field(block, kGname));
      h.devmajor = static_cast<std::uint32_t>(parse_number(field(block, kDevmajor), "devmajor"));
      h.devminor = static_cast<std::uint32_t>(parse_number(field(block, kDevminor), "devminor"));
    }

    std::size_t data_offset = pos + kBlock;
    // Links, directories and devices carry no data even if size is set.
    std::uint64_t stored_size = h.size;
    if (have_pending && pending_size) stored_size = pending.size;
    bool has_data = h.type == EntryType::kRegular || h.type == EntryType::kUnknown ||
                    flag == 'x' || flag == 'g' || flag == 'L' || flag == 'K';
    std::uint64_t data_size = has_data ? stored_size : 0;
    if (data_offset + data_size > archive.size()) {
      throw FormatError("tar: member '" + h.name + "' truncated");
    }
    std::string_view data = archive.substr(data_offset, data_size);
    pos = data_offset + ((data_size + kBlock - 1) / kBlock) * kBlock;

    if (flag == 'x') {
      apply_pax(data, pending, &pending_size);
      have_pending = true;
      continue;
    }
    if (flag == 'g') {
      Header g;
      apply_pax(data, g, nullptr);
      for (auto& [k, v] : g.extra_pax) global_pax[k] = v;
      continue;
    }
    if (flag == 'L') {
      gnu_longname = cstr(data);
      continue;
    }
    if (flag == 'K') {
      gnu_longlink = cstr(data);
      continue;
    }

    if (!gnu_longname.empty()) h.name = std::move(gnu_longname);
    if (!gnu_longlink.empty()) h.link_name = std::move(gnu_longlink);
    gnu_longname.clear();
    gnu_longlink.clear();
    if (have_pending) {
      if (!pending.name.empty()) h.name = pending.name;
      if (!pending.link_name.empty()) h.link_name = pending.link_name;
      if (pending_size) h.size = pending.size;
      if (pending.uid) h.uid = pending.uid;
      if (pending.gid) h.gid = pending.gid;
      if (pending.mtime) h.mtime = pending.mtime;
      if (!pending.uname.empty()) h.uname = pending.uname;
      if (!pending.gname.empty()) h.gname = pending.gname;
      h.extra_pax = pending.extra_pax;
    }
    for (const auto& [k, v] : global_pax) h.extra_pax.emplace(k, v);
    pending = Header{};
    have_pending = false;
    pending_size = false;
    if (!has_data) h.size = 0;

    entries.push_back({std::move(h), data_offset});
  }
  return entries;
}

namespace {

void put_string(std::string& block, Field f, std::string_view value) {
  std::memcpy(block.data() + f.off, value.data(), std::min(value.size(), f.len));
}

bool fits_octal(std::uint64_t v, std::size_t len) {
  // len - 1 digits plus the terminating NUL.
  std::size_t digits = len - 1;
  return digits >= 22 || v < (std::uint64_t{1} << (3 * digits));
}

void put_octal(std::string& block, Field f, std::uint64_t v) {
  std::string digits(f.len - 1, '0');
  for (std::size_t i = digits.size(); i-- > 0;) {
    digits[i] = static_cast<char>('0' + (v & 7));
    v >>= 3;
  }
  put_string(block, f, digits);
}

std::string pax_record(std::string_view key, std::string_view value) {
  // The length prefix counts itself, so iterate to a fixed point.
  std::size_t body = key.size() + value.size() + 3;  // ' ' '=' '\n'
  std::size_t len = body + 1;
  while (std::to_string(len).size() + body != len) {
    len = std::to_string(len).size() + body;
  }
  return std::to_string(len) + " " + std::string(key) + "=" + std::string(value) + "\n";
}

// Splits a name into ustar (prefix, name) if possible.
bool split_ustar(std::string_view full, std::string_view& prefix,
                 std::string_view& name) {
  if (full.size() <= kName.len) {
    prefix = {};
    name = full;
    return true;
  }
  for (std::size_t i = full.size(); i-- > 0;) {
    if (full[i] != '/') continue;
    if (i <= kPrefix.len && full.size() - i - 1 <= kName.len && i > 0 &&
        i + 1 < full.size()) {
      prefix = full.substr(0, i);
      name = full.substr(i + 1);
      return true;
    }
  }
  return false;
}

}  // namespace

void Writer::pad() {
  std::size_t rem = out_.size() % kBlock;
  if (rem != 0) out_.append(kBlock - rem, '\0');
}

void Writer::write_block_header(const Header& h, char typeflag,
                                std::string_view name, std::string_view prefix,
                                std::string_view link, std::uint64_t size) {
  std::string block(kBlock, '\0');
  put_string(block, kName, name);
  put_octal(block, kMode, h.mode & 07777);
  put_octal(block, kUid, fits_octal(h.uid, kUid.len) ? h.uid : 0);
  put_octal(block, kGid, fits_octal(h.gid, kGid.len) ? h.gid : 0);
  put_octal(block, kSize, fits_octal(size, kSize.len) ? size : 0);
  std::uint64_t mtime = h.mtime < 0 ? 0 : static_cast<std::uint64_t>(h.mtime);
  put_octal(block, kMtime, fits_octal(mtime, kMtime.len) ? mtime : 0);
  block[kTypeflag.off] = typeflag;
  put_string(block, kLinkname, link);
  put_string(block, kMagic, std::string_view("ustar\0", 6));
  put_string(block, kVersion, "00");
  put_string(block, kUname, h.uname.substr(0, kUname.len - 1));
  put_string(block, kGname, h.gname.substr(0, kGname.len - 1));
  put_octal(block, kDevmajor, h.devmajor);
  put_octal(block, kDevminor, h.devminor);
  put_string(block, kPrefix, prefix);
  std::memset(block.data() + kChksum.off, ' ', kChksum.len);
  unsigned sum = 0;
  for (unsigned char c : block) sum += c;
  std::string chk(6, '0');
  for (std::size_t i = chk.size(); i-- > 0;) {
    chk[i] = static_cast<char>('0' + (sum & 7));
    sum >>= 3;
  }
  std::memcpy(block.data() + kChksum.off, chk.data(), 6);
  block[kChksum.off + 6] = '\0';
  block[kChksum.off + 7] = ' ';
  out_ += block;
}

void Writer::add(const Header& h, std::string_view data) {
  std::string name = h.name;
  if (h.type == EntryType::kDirectory && !name.empty() && name.back() != '/') {
    name += '/';
  }
  std::uint64_t size = h.type == EntryType::kRegular ? data.size() : 0;

  std::string pax;
  std::string_view prefix;
  std::string_view short_name;
  if (!split_ustar(name, prefix, short_name)) {
    pax += pax_record("path", name);
    short_name = std::string_view(name).substr(0, kName.len);
    prefix = {};
  }
  std::string_view link = h.link_name;
  if (link.size() > kLinkname.len) {
    pax += pax_record("linkpath", h.link_name);
    link = link.substr(0, kLinkname.len);
  }
  if (!fits_octal(size, kSize.len)) pax += pax_record("size", std::to_string(size));
  if (!fits_octal(h.uid, kUid.len)) pax += pax_record("uid", std::to_string(h.uid));
  if (!fits_octal(h.gid, kGid.len)) pax += pax_record("gid", std::to_string(h.gid));
  if (h.mtime < 0 || !fits_octal(static_cast<std::uint64_t>(h.mtime), kMtime.len)) {
    pax += pax_record("mtime", std::to_string(h.mtime));
  }
  if (h.uname.size() >= kUname.len) pax += pax_record("uname", h.uname);
  if (h.gname.size() >= kGname.len) pax += pax_record("gname", h.gname);
  for (const auto& [k, v] : h.extra_pax) pax += pax_record(k, v);

  if (!pax.empty()) {
    Header ph;
    ph.mode = 0644;
    std::string pax_name = "PaxHeaders/" + std::string(short_name);
    if (pax_name.size() > kName.len) pax_name.resize(kName.len);
    write_block_header(ph, 'x', pax_name, {}, {}, pax.size());
    out_ += pax;
    pad();
  }
  char flag = h.type == EntryType::kUnknown && h.typeflag != 0 ? h.typeflag : typeflag_for(h.type);
  write_block_header(h, flag, short_name, prefix, link, size);
  if (size > 0) {
    out_.append(data.data(), data.size());
    pad();
  }
  ++count_;
}

std::string Writer::finish() {
  out_.append(2 * kBlock, '\0');
  return std::move(out_);
}

}  // namespace imgslim::tar
