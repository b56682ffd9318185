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

#include "imgslim/rootfs.hpp"

#include <set>

#include "imgslim/path.hpp"
#include "imgslim/tar.hpp"

namespace imgslim {

std::string_view to_string(FileKind kind) {
  switch (kind) {
    case FileKind::kRegular:
      return "regular";
    case FileKind::kDirectory:
      return "directory";
    case FileKind::kSymlink:
      return "symlink";
    case FileKind::kHardlink:
      return "hardlink";
    case FileKind::kDevice:
      return "device";
    case FileKind::kFifo:
      return "fifo";
  }
  return "unknown";
}

std::uint64_t content_size(const std::map<std::string, FileRecord>& records) {
  std::uint64_t total = 0;
  for (const auto& [path, rec] : records) {
    if (rec.kind == FileKind::kRegular) total += rec.size;
  }
  return total;
}

std::uint64_t FlattenedRootfs::total_size() const {
  return content_size(entries);
}

namespace {

tar::Header header_for(const FileRecord& rec) {
  tar::Header h;
  h.name = rec.path.substr(1);
  h.mode = rec.mode;
  h.uid = rec.uid;
  h.gid = rec.gid;
  h.mtime = rec.mtime;
  h.uname = rec.uname;
  h.gname = rec.gname;
  h.extra_pax = rec.extra_pax;
  switch (rec.kind) {
    case FileKind::kRegular:
      h.type = tar::EntryType::kRegular;
      break;
    case FileKind::kDirectory:
      h.type = tar::EntryType::kDirectory;
      break;
    case FileKind::kSymlink:
      h.type = tar::EntryType::kSymlink;
      h.link_name = rec.link_target.value_or("");
      break;
    case FileKind::kHardlink:
      h.type = tar::EntryType::kHardlink;
      h.link_name = rec.link_target.value_or("/").substr(1);
      break;
    case FileKind::kDevice:
      h.type = rec.device_type == '4' ? tar::EntryType::kBlockDevice
                                      : tar::EntryType::kCharDevice;
      h.devmajor = rec.devmajor;
      h.devminor = rec.devminor;
      break;
    case FileKind::kFifo:
      h.type = tar::EntryType::kFifo;
      break;
  }
  return h;
}

}  // namespace

std::string write_rootfs_tar(const std::map<std::string, FileRecord>& records) {
  tar::Writer writer;
  std::set<std::string> written;
  // Hard links whose target sorts after them wait here, keyed by target.
  std::multimap<std::string, const FileRecord*> deferred;

  auto emit = [&](const FileRecord& rec, auto& self) -> void {
    if (rec.kind == FileKind::kHardlink) {
      const auto& target = *rec.link_target;
      if (!records.contains(target)) {
        // Target not shipped: materialize the content instead.
        FileRecord copy = rec;
        copy.kind = FileKind::kRegular;
        copy.link_target.reset();
        writer.add(header_for(copy), copy.content.view());
        written.insert(rec.path);
        return;
      }
      if (!written.contains(target)) {
        deferred.emplace(target, &rec);
        return;
      }
      writer.add(header_for(rec));
    } else {
      writer.add(header_for(rec), rec.content.view());
    }
    written.insert(rec.path);
    auto [lo, hi] = deferred.equal_range(rec.path);
    std::vector<const FileRecord*> ready;
    for (auto it = lo; it != hi; ++it) ready.push_back(it->second);
    deferred.erase(lo, hi);
    for (const auto* r : ready) self(*r, self);
  };

  for (const auto& [path, rec] : records) emit(rec, emit);
  // Anything still deferred points at a hard-link cycle; ship as files.
  for (const auto& [target, rec] : deferred) {
    FileRecord copy = *rec;
    copy.kind = FileKind::kRegular;
    copy.link_target.reset();
    writer.add(header_for(copy), copy.content.view());
  }
  return writer.finish();
}

}  // namespace imgslim
