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

#include "imgslim/elf.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cstring>
#include <deque>
#include <regex>
#include <sstream>

#include "imgslim/path.hpp"

namespace imgslim {

namespace {

constexpr std::uint32_t kPtLoad = 1;
constexpr std::uint32_t kPtDynamic = 2;
constexpr std::uint32_t kPtInterp = 3;
constexpr std::uint32_t kShtDynamic = 6;

constexpr std::int64_t kDtNull = 0;
constexpr std::int64_t kDtNeeded = 1;
constexpr std::int64_t kDtStrtab = 5;
constexpr std::int64_t kDtStrsz = 10;
constexpr std::int64_t kDtSoname = 14;
constexpr std::int64_t kDtRpath = 15;
constexpr std::int64_t kDtRunpath = 29;

// Bounds-checked, endian-aware field reader.
class Reader {
 public:
  Reader(std::string_view bytes, bool little) : bytes_(bytes), little_(little) {}

  std::uint64_t read(std::uint64_t offset, std::size_t width) const {
    if (offset > bytes_.size() || width > bytes_.size() - offset) {
      throw FormatError("ELF: read past end of file at offset " + std::to_string(offset));
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) {
      std::size_t idx = little_ ? width - 1 - i : i;
      v = (v << 8) | static_cast<unsigned char>(bytes_[offset + idx]);
    }
    return v;
  }
  std::uint16_t u16(std::uint64_t off) const { return static_cast<std::uint16_t>(read(off, 2)); }
  std::uint32_t u32(std::uint64_t off) const { return static_cast<std::uint32_t>(read(off, 4)); }
  std::uint64_t u64(std::uint64_t off) const { return read(off, 8); }

  std::string cstring(std::uint64_t offset, std::uint64_t limit) const {
    if (offset >= bytes_.size()) throw FormatError("ELF: string offset out of range");
    std::uint64_t end = std::min<std::uint64_t>(limit, bytes_.size());
    std::string_view rest = bytes_.substr(offset, end - offset);
    auto nul = rest.find('\0');
    if (nul == std::string_view::npos) throw FormatError("ELF: unterminated string");
    return std::string(rest.substr(0, nul));
  }

  std::size_t size() const { return bytes_.size(); }

 private:
  std::string_view bytes_;
  bool little_;
};

struct Segment {
  std::uint32_t type;
  std::uint64_t offset;
  std::uint64_t vaddr;
  std::uint64_t filesz;
};

std::vector<std::string> split_search_path(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ':')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string platform_name(std::uint16_t machine) {
  switch (machine) {
    case 3:
      return "i686";
    case 40:
      return "arm";
    case 62:
      return "x86_64";
    case 183:
      return "aarch64";
    case 243:
      return "riscv64";
    default:
      return "unknown";
  }
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

}  // namespace

ElfInfo parse_elf(std::string_view bytes) {
  ElfInfo info;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "\x7f" "ELF", 4) != 0) return info;
  if (bytes.size() < 16) throw FormatError("ELF: truncated identification");
  info.is_elf = true;
  unsigned char cls = static_cast<unsigned char>(bytes[4]);
  unsigned char data = static_cast<unsigned char>(bytes[5]);
  if (cls != 1 && cls != 2) throw FormatError("ELF: invalid class");
  if (data != 1 && data != 2) throw FormatError("ELF: invalid data encoding");
  info.elf_class = cls == 1 ? 32 : 64;
  info.little_endian = data == 1;
  bool is64 = cls == 2;
  Reader r(bytes, info.little_endian);

  info.type = r.u16(16);
  info.machine = r.u16(18);
  std::uint64_t phoff = is64 ? r.u64(32) : r.u32(28);
  std::uint64_t shoff = is64 ? r.u64(40) : r.u32(32);
  std::uint16_t phentsize = r.u16(is64 ? 54 : 42);
  std::uint16_t phnum = r.u16(is64 ? 56 : 44);
  std::uint16_t shentsize = r.u16(is64 ? 58 : 46);
  std::uint16_t shnum = r.u16(is64 ? 60 : 48);

  std::vector<Segment> segments;
  if (phnum > 0 && phentsize < (is64 ? 56 : 32)) throw FormatError("ELF: bad phentsize");
  for (std::uint16_t i = 0; i < phnum; ++i) {
    std::uint64_t base = phoff + std::uint64_t{i} * phentsize;
    Segment s{};
    s.type = r.u32(base);
    if (is64) {
      s.offset = r.u64(base + 8);
      s.vaddr = r.u64(base + 16);
      s.filesz = r.u64(base + 32);
    } else {
      s.offset = r.u32(base + 4);
      s.vaddr = r.u32(base + 8);
      s.filesz = r.u32(base + 16);
    }
    segments.push_back(s);
  }

  const Segment* dynamic = nullptr;
  for (const auto& s : segments) {
    if (s.type == kPtInterp) {
      info.interpreter = r.cstring(s.offset, s.offset + s.filesz);
    } else if (s.type == kPtDynamic) {
      dynamic = &s;
    }
  }
  if (dynamic == nullptr) return info;

  struct Dyn {
    std::int64_t tag;
    std::uint64_t val;
  };
  std::vector<Dyn> entries;
  std::size_t dyn_size = is64 ? 16 : 8;
  for (std::uint64_t off = dynamic->offset; off + dyn_size <= dynamic->offset + dynamic->filesz;
       off += dyn_size) {
    Dyn d{};
    if (is64) {
      d.tag = static_cast<std::int64_t>(r.u64(off));
      d.val = r.u64(off + 8);
    } else {
      d.tag = static_cast<std::int32_t>(r.u32(off));
      d.val = r.u32(off + 4);
    }
    if (d.tag == kDtNull) break;
    entries.push_back(d);
  }

  std::optional<std::uint64_t> strtab_vaddr;
  std::uint64_t strsz = 0;
  for (const auto& d : entries) {
    if (d.tag == kDtStrtab) strtab_vaddr = d.val;
    if (d.tag == kDtStrsz) strsz = d.val;
  }
  bool wants_strings = std::any_of(entries.begin(), entries.end(), [](const Dyn& d) {
    return d.tag == kDtNeeded || d.tag == kDtSoname || d.tag == kDtRpath ||
           d.tag == kDtRunpath;
  });
  if (!wants_strings) return info;

  std::optional<std::uint64_t> strtab_off;
  if (strtab_vaddr) {
    for (const auto& s : segments) {
      if (s.type == kPtLoad && *strtab_vaddr >= s.vaddr &&
          *strtab_vaddr < s.vaddr + s.filesz) {
        strtab_off = *strtab_vaddr - s.vaddr + s.offset;
        break;
      }
    }
  }
  if (!strtab_off && shoff != 0 && shnum > 0) {
    // Fall back to the section table: .dynamic's sh_link names .dynstr.
    std::uint64_t sh_size = is64 ? 64 : 40;
    if (shentsize < sh_size) throw FormatError("ELF: bad shentsize");
    for (std::uint16_t i = 0; i < shnum && !strtab_off; ++i) {
      std::uint64_t base = shoff + std::uint64_t{i} * shentsize;
      if (r.u32(base + 4) != kShtDynamic) continue;
      std::uint32_t link = r.u32(base + (is64 ? 40 : 24));
      std::uint64_t link_base = shoff + std::uint64_t{link} * shentsize;
      strtab_off = is64 ? r.u64(link_base + 24) : r.u32(link_base + 16);
      strsz = is64 ? r.u64(link_base + 32) : r.u32(link_base + 20);
    }
  }
  if (!strtab_off) throw FormatError("ELF: dynamic string table not mapped");
  std::uint64_t limit = strsz ? *strtab_off + strsz : r.size();

  for (const auto& d : entries) {
    switch (d.tag) {
      case kDtNeeded:
        info.needed.push_back(r.cstring(*strtab_off + d.val, limit));
        break;
      case kDtSoname:
        info.soname = r.cstring(*strtab_off + d.val, limit);
        break;
      case kDtRpath:
        for (auto& p : split_search_path(r.cstring(*strtab_off + d.val, limit))) {
          info.rpath.push_back(std::move(p));
        }
        break;
      case kDtRunpath:
        for (auto& p : split_search_path(r.cstring(*strtab_off + d.val, limit))) {
          info.runpath.push_back(std::move(p));
        }
        break;
      default:
        break;
    }
  }
  return info;
}

// ---------------------------------------------------------------------------

LibraryResolver::LibraryResolver(const FileInfoList& info, Diagnostics* diag)
    : info_(info), diag_(diag) {
  auto is_dir = [&](const std::string& p) {
    Resolution r = info_.realpath(p);
    return r.ok() && r.record != nullptr && r.record->kind == FileKind::kDirectory;
  };

  // musl reads /etc/ld-musl-<arch>.path; glibc reads /etc/ld.so.conf.
  for (const FileRecord* rec : info_.children("/etc")) {
    std::string base = vpath::basename(rec->path);
    if (base.starts_with("ld-musl-") && base.ends_with(".path") && rec->is_file()) {
      std::string text(rec->content.view());
      replace_all(text, "\n", ":");
      for (auto& d : split_search_path(text)) configured_.push_back(vpath::normalize(d));
    }
  }
  load_ld_so_conf("/etc/ld.so.conf", 0);

  static const std::regex triplet(R"(^[a-z0-9_]+-linux-[a-z0-9_]+$)");
  for (const std::string base : {"/lib", "/usr/lib"}) {
    Resolution r = info_.realpath(base);
    if (!r.ok() || r.record == nullptr) continue;
    for (const FileRecord* child : info_.children(r.path)) {
      std::string name = vpath::basename(child->path);
      if (std::regex_match(name, triplet) && is_dir(child->path)) {
        defaults_.push_back(base + "/" + name);
      }
    }
  }
  for (const std::string d : {"/lib", "/usr/lib", "/lib64", "/usr/lib64"}) {
    if (is_dir(d)) defaults_.push_back(d);
  }
}

void LibraryResolver::load_ld_so_conf(const std::string& conf, int depth) {
  if (depth > 8) return;
  Resolution r = info_.realpath(conf);
  if (!r.ok() || r.record == nullptr || !r.record->is_file()) return;
  std::istringstream in{std::string(r.record->content.view())};
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::string word;
    if (!(words >> word)) continue;
    if (word == "include") {
      std::string pattern;
      while (words >> pattern) {
        std::string abs = vpath::join(vpath::parent(conf), pattern);
        Resolution dir = info_.realpath(vpath::parent(abs));
        if (!dir.ok()) continue;
        std::string glob = vpath::basename(abs);
        std::vector<std::string> matches;
        for (const FileRecord* child : info_.children(dir.path)) {
          std::string base = vpath::basename(child->path);
          if (fnmatch(glob.c_str(), base.c_str(), 0) == 0) matches.push_back(child->path);
        }
        std::sort(matches.begin(), matches.end());
        for (const auto& m : matches) load_ld_so_conf(m, depth + 1);
      }
      continue;
    }
    if (word == "hwcap") continue;
    do {
      std::string item = word;
      std::replace(item.begin(), item.end(), ',', ':');
      for (auto& d : split_search_path(item)) {
        std::string norm = vpath::normalize(d);
        if (std::find(configured_.begin(), configured_.end(), norm) == configured_.end()) {
          configured_.push_back(norm);
        }
      }
    } while (words >> word);
  }
}

const ElfInfo* LibraryResolver::info_for(const std::string& physical_path) {
  auto it = cache_.find(physical_path);
  if (it == cache_.end()) {
    std::optional<ElfInfo> parsed;
    const FileRecord* rec = info_.find(physical_path);
    if (rec != nullptr && rec->is_file()) {
      try {
        ElfInfo e = parse_elf(rec->content.view());
        if (e.is_elf) parsed = std::move(e);
      } catch (const FormatError& e) {
        warn(diag_, "elf", physical_path + ": " + e.what() + "; treated as non-ELF");
      }
    }
    it = cache_.emplace(physical_path, std::move(parsed)).first;
  }
  return it->second ? &*it->second : nullptr;
}

namespace {

void add_trace(const FileInfoList& info, const Resolution& r, std::set<std::string>& out) {
  for (const auto& p : r.visited) {
    const FileRecord* rec = info.find(p);
    if (rec != nullptr && rec->kind != FileKind::kDirectory) out.insert(p);
  }
}

}  // namespace

std::optional<std::string> LibraryResolver::locate(const std::string& needed,
                                                   const ElfInfo& requester,
                                                   const std::string& requester_path,
                                                   const ElfInfo& root, ElfClosure& out) {
  auto accept = [&](const std::string& candidate) -> std::optional<std::string> {
    Resolution r = info_.realpath(candidate);
    if (!r.ok() || r.record == nullptr || !r.record->is_file()) return std::nullopt;
    const ElfInfo* lib = info_for(r.path);
    if (lib == nullptr || lib->elf_class != requester.elf_class ||
        lib->machine != requester.machine) {
      return std::nullopt;
    }
    add_trace(info_, r, out.paths);
    return r.path;
  };

  if (needed.find('/') != std::string::npos) return accept(vpath::join("/", needed));

  auto expand = [&](const std::vector<std::string>& entries, std::vector<std::string>& dirs) {
    for (std::string e : entries) {
      replace_all(e, "${ORIGIN}", vpath::parent(requester_path));
      replace_all(e, "$ORIGIN", vpath::parent(requester_path));
      std::string lib = requester.elf_class == 64 ? "lib64" : "lib";
      replace_all(e, "${LIB}", lib);
      replace_all(e, "$LIB", lib);
      replace_all(e, "${PLATFORM}", platform_name(requester.machine));
      replace_all(e, "$PLATFORM", platform_name(requester.machine));
      dirs.push_back(vpath::normalize(e));
    }
  };

  std::vector<std::string> dirs;
  if (requester.runpath.empty()) {
    expand(requester.rpath, dirs);
    if (&root != &requester && root.runpath.empty()) expand(root.rpath, dirs);
  }
  expand(requester.runpath, dirs);
  dirs.insert(dirs.end(), configured_.begin(), configured_.end());
  dirs.insert(dirs.end(), defaults_.begin(), defaults_.end());

  for (const auto& dir : dirs) {
    if (auto found = accept(vpath::join(dir, needed))) return found;
  }
  return std::nullopt;
}

ElfClosure LibraryResolver::closure(std::string_view path) {
  ElfClosure out;
  Resolution start = info_.realpath(path);
  if (!start.ok() || start.record == nullptr || !start.record->is_file()) return out;
  const ElfInfo* root = info_for(start.path);
  if (root == nullptr || !root->is_dynamic()) return out;

  std::set<std::string> seen{start.path};
  std::deque<std::string> queue{start.path};
  while (!queue.empty()) {
    std::string current = queue.front();
    queue.pop_front();
    const ElfInfo* elf = info_for(current);
    if (elf == nullptr) continue;

    if (elf->interpreter) {
      Resolution r = info_.realpath(*elf->interpreter);
      if (r.ok() && r.record != nullptr && r.record->is_file()) {
        std::set<std::string> trace;
        add_trace(info_, r, trace);
        out.paths.insert(trace.begin(), trace.end());
        out.interpreters.insert(trace.begin(), trace.end());
        if (seen.insert(r.path).second) queue.push_back(r.path);
      } else {
        out.missing.push_back({current, *elf->interpreter});
      }
    }
    for (const auto& needed : elf->needed) {
      auto found = locate(needed, *elf, current, *root, out);
      if (!found) {
        out.missing.push_back({current, needed});
        warn(diag_, "elf", current + ": needed library " + needed + " not found in rootfs");
        continue;
      }
      if (seen.insert(*found).second) queue.push_back(*found);
    }
  }
  out.paths.erase(start.path);
  out.interpreters.erase(start.path);
  return out;
}

std::set<std::string> resolve_elf_dependencies(std::string_view binary_path,
                                               const FileInfoList& info,
                                               Diagnostics* diag) {
  LibraryResolver resolver(info, diag);
  return resolver.closure(binary_path).paths;
}

}  // namespace imgslim
