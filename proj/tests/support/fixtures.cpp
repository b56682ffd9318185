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


#include "fixtures.hpp"

#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "imgslim/digest.hpp"
#include "imgslim/gzip.hpp"
#include "imgslim/path.hpp"

namespace imgslim::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "imgslim-test-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_text(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// ---------------------------------------------------------------------------

namespace {

FileRecord base_record(const std::string& path, FileKind kind, std::uint32_t mode) {
  FileRecord r;
  r.path = path;
  r.kind = kind;
  r.mode = mode;
  return r;
}

}  // namespace

void RootfsBuilder::parents(const std::string& path) {
  for (const auto& a : vpath::ancestors(path)) {
    if (!records_.count(a)) records_.emplace(a, base_record(a, FileKind::kDirectory, 0755));
  }
}

RootfsBuilder& RootfsBuilder::dir(const std::string& path, std::uint32_t mode) {
  parents(path);
  records_[path] = base_record(path, FileKind::kDirectory, mode);
  return *this;
}

RootfsBuilder& RootfsBuilder::file(const std::string& path, const std::string& content,
                                   std::uint32_t mode) {
  parents(path);
  FileRecord r = base_record(path, FileKind::kRegular, mode);
  r.size = content.size();
  r.content = Blob{std::make_shared<const std::string>(content), 0, content.size()};
  records_[path] = std::move(r);
  return *this;
}

RootfsBuilder& RootfsBuilder::exe(const std::string& path, const std::string& content) {
  return file(path, content, 0755);
}

RootfsBuilder& RootfsBuilder::symlink(const std::string& path, const std::string& target) {
  parents(path);
  FileRecord r = base_record(path, FileKind::kSymlink, 0777);
  r.link_target = target;
  r.size = target.size();
  records_[path] = std::move(r);
  return *this;
}

RootfsBuilder& RootfsBuilder::hardlink(const std::string& path, const std::string& target) {
  parents(path);
  FileRecord r = base_record(path, FileKind::kHardlink, 0644);
  r.link_target = target;
  auto it = records_.find(target);
  if (it != records_.end()) {
    r.mode = it->second.mode;
    r.content = it->second.content;
    r.size = it->second.size;
  }
  records_[path] = std::move(r);
  return *this;
}

RootfsBuilder& RootfsBuilder::remove(const std::string& path) {
  records_.erase(path);
  return *this;
}

// ---------------------------------------------------------------------------
// ELF writer

namespace {

class Bytes {
 public:
  explicit Bytes(bool le) : le_(le) {}

  void put(std::size_t off, std::uint64_t v, std::size_t width) {
    if (buf_.size() < off + width) buf_.resize(off + width, '\0');
    for (std::size_t i = 0; i < width; ++i) {
      std::size_t idx = le_ ? i : width - 1 - i;
      buf_[off + idx] = static_cast<char>((v >> (8 * i)) & 0xff);
    }
  }
  void put_bytes(std::size_t off, const std::string& s) {
    if (buf_.size() < off + s.size()) buf_.resize(off + s.size(), '\0');
    buf_.replace(off, s.size(), s);
  }
  void pad_to(std::size_t n) {
    if (buf_.size() < n) buf_.resize(n, '\0');
  }
  std::size_t size() const { return buf_.size(); }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
  bool le_;
};

std::size_t align(std::size_t v, std::size_t a) { return (v + a - 1) / a * a; }

std::string join_colon(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ":") + s;
  return out;
}

}  // namespace

std::string build_elf(const ElfSpec& spec) {
  const bool is64 = spec.elf_class == 64;
  const std::size_t ehsize = is64 ? 64 : 52;
  const std::size_t phentsize = is64 ? 56 : 32;
  const std::size_t dynsize = is64 ? 16 : 8;
  const std::size_t shentsize = is64 ? 64 : 40;
  const std::size_t word = is64 ? 8 : 4;
  const std::uint64_t base = 0x400000;

  bool dynamic = !spec.needed.empty() || !spec.rpath.empty() || !spec.runpath.empty() ||
                 spec.soname.has_value();
  std::size_t phnum = 1 + (spec.interpreter ? 1 : 0) + (dynamic ? 1 : 0);

  // String table.
  std::string strtab(1, '\0');
  auto intern = [&](const std::string& s) {
    std::size_t off = strtab.size();
    strtab += s;
    strtab += '\0';
    return off;
  };
  std::vector<std::pair<std::int64_t, std::uint64_t>> dyn;
  for (const auto& n : spec.needed) dyn.emplace_back(1, intern(n));
  if (spec.soname) dyn.emplace_back(14, intern(*spec.soname));
  if (!spec.rpath.empty()) dyn.emplace_back(15, intern(join_colon(spec.rpath)));
  if (!spec.runpath.empty()) dyn.emplace_back(29, intern(join_colon(spec.runpath)));

  std::size_t off = ehsize + phnum * phentsize;
  std::size_t interp_off = off;
  if (spec.interpreter) off += spec.interpreter->size() + 1;
  std::size_t strtab_off = off;
  off += strtab.size();
  off = align(off, word);
  std::size_t dyn_off = off;
  std::size_t dyn_count = dynamic ? dyn.size() + 3 : 0;  // + STRTAB, STRSZ, NULL
  off += dyn_count * dynsize;
  off = align(off, word);
  std::size_t sh_off = spec.strtab_via_sections && dynamic ? off : 0;
  std::size_t shnum = sh_off ? 3 : 0;
  std::size_t total = off + shnum * shentsize;

  Bytes b(spec.little_endian);
  b.pad_to(total);
  b.put_bytes(0, std::string("\x7f" "ELF", 4));
  b.put(4, is64 ? 2 : 1, 1);
  b.put(5, spec.little_endian ? 1 : 2, 1);
  b.put(6, 1, 1);
  b.put(16, spec.type, 2);
  b.put(18, spec.machine, 2);
  b.put(20, 1, 4);
  if (is64) {
    b.put(32, ehsize, 8);
    b.put(40, sh_off, 8);
    b.put(52, ehsize, 2);
    b.put(54, phentsize, 2);
    b.put(56, phnum, 2);
    b.put(58, shentsize, 2);
    b.put(60, shnum, 2);
  } else {
    b.put(28, ehsize, 4);
    b.put(32, sh_off, 4);
    b.put(40, ehsize, 2);
    b.put(42, phentsize, 2);
    b.put(44, phnum, 2);
    b.put(46, shentsize, 2);
    b.put(48, shnum, 2);
  }

  auto phdr = [&](std::size_t index, std::uint32_t type, std::uint64_t offset,
                  std::uint64_t vaddr, std::uint64_t filesz) {
    std::size_t p = ehsize + index * phentsize;
    b.put(p, type, 4);
    if (is64) {
      b.put(p + 8, offset, 8);
      b.put(p + 16, vaddr, 8);
      b.put(p + 24, vaddr, 8);
      b.put(p + 32, filesz, 8);
      b.put(p + 40, filesz, 8);
    } else {
      b.put(p + 4, offset, 4);
      b.put(p + 8, vaddr, 4);
      b.put(p + 12, vaddr, 4);
      b.put(p + 16, filesz, 4);
      b.put(p + 20, filesz, 4);
    }
  };
  std::size_t idx = 0;
  if (spec.interpreter) {
    b.put_bytes(interp_off, *spec.interpreter);
    phdr(idx++, 3, interp_off, base + interp_off, spec.interpreter->size() + 1);
  }
  // With strtab_via_sections the load segment stops before the string table.
  std::size_t load_size = spec.strtab_via_sections ? strtab_off : total;
  phdr(idx++, 1, 0, base, load_size);
  if (dynamic) {
    phdr(idx++, 2, dyn_off, base + dyn_off, dyn_count * dynsize);
    b.put_bytes(strtab_off, strtab);
    std::uint64_t strtab_vaddr = spec.strtab_via_sections ? 0x900000 : base + strtab_off;
    dyn.emplace_back(5, strtab_vaddr);
    dyn.emplace_back(10, strtab.size());
    dyn.emplace_back(0, 0);
    for (std::size_t i = 0; i < dyn.size(); ++i) {
      std::size_t p = dyn_off + i * dynsize;
      b.put(p, static_cast<std::uint64_t>(dyn[i].first), word);
      b.put(p + word, dyn[i].second, word);
    }
  }
  if (shnum) {
    auto shdr = [&](std::size_t index, std::uint32_t type, std::uint64_t offset,
                    std::uint64_t size, std::uint32_t link) {
      std::size_t p = sh_off + index * shentsize;
      b.put(p + 4, type, 4);
      if (is64) {
        b.put(p + 24, offset, 8);
        b.put(p + 32, size, 8);
        b.put(p + 40, link, 4);
      } else {
        b.put(p + 16, offset, 4);
        b.put(p + 20, size, 4);
        b.put(p + 24, link, 4);
      }
    };
    shdr(1, 3, strtab_off, strtab.size(), 0);
    shdr(2, 6, dyn_off, dyn_count * dynsize, 1);
  }
  return b.take();
}

// ---------------------------------------------------------------------------
// Layer and image archives

tar::Header dir_header(const std::string& name, std::uint32_t mode) {
  tar::Header h;
  h.name = name;
  h.type = tar::EntryType::kDirectory;
  h.typeflag = '5';
  h.mode = mode;
  return h;
}

tar::Header file_header(const std::string& name, std::size_t size, std::uint32_t mode) {
  tar::Header h;
  h.name = name;
  h.type = tar::EntryType::kRegular;
  h.typeflag = '0';
  h.size = size;
  h.mode = mode;
  return h;
}

tar::Header symlink_header(const std::string& name, const std::string& target) {
  tar::Header h;
  h.name = name;
  h.type = tar::EntryType::kSymlink;
  h.typeflag = '2';
  h.link_name = target;
  h.mode = 0777;
  return h;
}

tar::Header hardlink_header(const std::string& name, const std::string& target) {
  tar::Header h;
  h.name = name;
  h.type = tar::EntryType::kHardlink;
  h.typeflag = '1';
  h.link_name = target;
  return h;
}

namespace {

nlohmann::json config_json(const ImageMetadata& m, const std::vector<std::string>& diff_ids) {
  nlohmann::json cfg = nlohmann::json::object();
  cfg["Env"] = m.env_vars;
  if (m.entrypoint) cfg["Entrypoint"] = *m.entrypoint;
  if (m.cmd) cfg["Cmd"] = *m.cmd;
  if (m.working_dir) cfg["WorkingDir"] = *m.working_dir;
  if (!m.exposed_ports.empty()) {
    nlohmann::json ports = nlohmann::json::object();
    for (const auto& p : m.exposed_ports) ports[p.to_string()] = nlohmann::json::object();
    cfg["ExposedPorts"] = ports;
  }
  if (!m.labels.empty()) cfg["Labels"] = m.labels;
  return {{"architecture", m.architecture},
          {"os", m.os},
          {"config", cfg},
          {"rootfs", {{"type", "layers"}, {"diff_ids", diff_ids}}},
          {"history", nlohmann::json::array()}};
}

void add_member(tar::Writer& w, const std::string& name, const std::string& data) {
  w.add(file_header(name, data.size()), data);
}

}  // namespace

std::string build_image_archive(const ImageFixture& f) {
  std::vector<std::string> diff_ids;
  std::vector<std::string> blobs;
  for (const auto& layer : f.layer_tars) {
    diff_ids.push_back(sha256_digest(layer));
    blobs.push_back(f.gzip ? gzip_compress(layer) : layer);
  }
  std::string config = config_json(f.metadata, diff_ids).dump();
  std::string config_hex = sha256_hex(config);
  std::string ref = f.metadata.reference();

  tar::Writer w;
  if (f.layout == ImageLayout::kOci) {
    nlohmann::json layers = nlohmann::json::array();
    std::string layer_type = f.gzip ? "application/vnd.oci.image.layer.v1.tar+gzip"
                                    : "application/vnd.oci.image.layer.v1.tar";
    for (const auto& b : blobs) {
      layers.push_back({{"mediaType", layer_type},
                        {"digest", sha256_digest(b)},
                        {"size", b.size()}});
    }
    std::string manifest =
        nlohmann::json{{"schemaVersion", 2},
                       {"mediaType", "application/vnd.oci.image.manifest.v1+json"},
                       {"config",
                        {{"mediaType", "application/vnd.oci.image.config.v1+json"},
                         {"digest", "sha256:" + config_hex},
                         {"size", config.size()}}},
                       {"layers", layers}}
            .dump();
    nlohmann::json desc = {{"mediaType", "application/vnd.oci.image.manifest.v1+json"},
                           {"digest", sha256_digest(manifest)},
                           {"size", manifest.size()}};
    if (!ref.empty()) {
      desc["annotations"] = {{"io.containerd.image.name", ref},
                             {"org.opencontainers.image.ref.name", f.metadata.tag}};
    }
    nlohmann::json index = {{"schemaVersion", 2}, {"manifests", {desc}}};
    w.add(dir_header("blobs"));
    w.add(dir_header("blobs/sha256"));
    add_member(w, "blobs/sha256/" + config_hex, config);
    add_member(w, "blobs/sha256/" + sha256_hex(manifest), manifest);
    for (const auto& b : blobs) add_member(w, "blobs/sha256/" + sha256_hex(b), b);
    add_member(w, "index.json", index.dump());
    add_member(w, "oci-layout", R"({"imageLayoutVersion":"1.0.0"})");
  } else {
    nlohmann::json layer_paths = nlohmann::json::array();
    for (std::size_t i = 0; i < blobs.size(); ++i) {
      std::string dir = sha256_hex(diff_ids[i] + std::to_string(i));
      w.add(dir_header(dir));
      add_member(w, dir + "/VERSION", "1.0");
      add_member(w, dir + "/layer.tar", blobs[i]);
      layer_paths.push_back(dir + "/layer.tar");
    }
    add_member(w, config_hex + ".json", config);
    nlohmann::json entry = {{"Config", config_hex + ".json"}, {"Layers", layer_paths}};
    entry["RepoTags"] = ref.empty() ? nlohmann::json(nullptr) : nlohmann::json::array({ref});
    add_member(w, "manifest.json", nlohmann::json::array({entry}).dump());
  }
  return w.finish();
}

// ---------------------------------------------------------------------------

RootfsBuilder minimal_shell_rootfs() {
  RootfsBuilder b;
  b.dir("/usr").dir("/usr/bin");
  b.exe("/usr/bin/dash");
  b.symlink("/usr/bin/sh", "dash");
  b.symlink("/bin", "usr/bin");
  return b;
}

RootfsBuilder sample_rootfs() {
  const std::string ld = "/lib64/ld-linux-x86-64.so.2";
  auto dyn_exe = [&](std::vector<std::string> needed) {
    ElfSpec s;
    s.type = 3;
    s.interpreter = ld;
    s.needed = std::move(needed);
    return build_elf(s);
  };
  auto lib = [&](const std::string& soname, std::vector<std::string> needed) {
    ElfSpec s;
    s.soname = soname;
    s.needed = std::move(needed);
    return build_elf(s);
  };

  RootfsBuilder b;
  b.symlink("/bin", "usr/bin");
  b.symlink("/sbin", "usr/sbin");
  b.symlink("/lib", "usr/lib");
  b.symlink("/lib64", "usr/lib64");
  b.dir("/usr/bin").dir("/usr/sbin").dir("/usr/lib/x86_64-linux-gnu").dir("/usr/lib64");
  b.dir("/usr/local/bin").dir("/usr/local/sbin");

  b.file("/usr/bin/dash", dyn_exe({"libc.so.6"}), 0755);
  b.symlink("/usr/bin/sh", "dash");
  b.file("/usr/bin/ls", dyn_exe({"libselinux.so.1", "libc.so.6"}), 0755);
  b.file("/usr/bin/tar", dyn_exe({"libc.so.6"}), 0755);
  b.file("/usr/bin/rm", dyn_exe({"libc.so.6"}), 0755);
  b.file("/usr/bin/env", dyn_exe({"libc.so.6"}), 0755);
  b.file("/usr/bin/perl", dyn_exe({"libperl.so.5.36", "libc.so.6"}) + std::string(4000, 'p'),
         0755);
  b.file("/usr/sbin/useradd", dyn_exe({"libc.so.6"}), 0755);

  b.file("/usr/lib/x86_64-linux-gnu/libc.so.6",
         [&] {
           ElfSpec s;
           s.soname = "libc.so.6";
           s.interpreter = ld;
           return build_elf(s);
         }() + std::string(2000, 'c'),
         0755);
  b.file("/usr/lib/x86_64-linux-gnu/libselinux.so.1.0", lib("libselinux.so.1", {"libc.so.6"}),
         0644);
  b.symlink("/usr/lib/x86_64-linux-gnu/libselinux.so.1", "libselinux.so.1.0");
  b.file("/usr/lib/x86_64-linux-gnu/libperl.so.5.36",
         lib("libperl.so.5.36", {"libc.so.6"}) + std::string(8000, 'l'), 0644);
  b.file("/usr/lib/x86_64-linux-gnu/ld-linux-x86-64.so.2", lib("ld-linux-x86-64.so.2", {}),
         0755);
  b.symlink("/usr/lib64/ld-linux-x86-64.so.2", "../lib/x86_64-linux-gnu/ld-linux-x86-64.so.2");

  b.file("/etc/passwd", "root:x:0:0:root:/root:/bin/sh\n");
  b.file("/etc/ld.so.conf", "include /etc/ld.so.conf.d/*.conf\n");
  b.file("/etc/ld.so.conf.d/x86_64-linux-gnu.conf",
         "# multiarch support\n/usr/local/lib/x86_64-linux-gnu\n/lib/x86_64-linux-gnu\n"
         "/usr/lib/x86_64-linux-gnu\n");
  b.file("/usr/share/doc/dash/copyright", "copyright text\n");
  b.file("/var/cache/app/state", "cached\n");
  b.dir("/tmp", 01777);
  b.file("/app/server.js", "const { exec } = require('child_process');\nexec('ls -la');\n");
  return b;
}

ImageMetadata sample_metadata() {
  ImageMetadata m;
  m.image_name = "example/sample";
  m.tag = "latest";
  m.architecture = "amd64";
  m.os = "linux";
  m.env_vars = {"PATH=/usr/local/sbin:/usr/local/bin:/usr/sbin:/usr/bin:/sbin:/bin"};
  m.exposed_ports = {ExposedPort{8080, "tcp"}};
  m.cmd = std::vector<std::string>{"node", "/app/server.js"};
  m.working_dir = "/app";
  m.labels = {{"org.example.fixture", "sample"}};
  return m;
}

void write_tree(const fs::path& root, const std::map<std::string, std::string>& files) {
  for (const auto& [rel, content] : files) write_text(root / rel, content);
}

namespace {

std::string manifest_json(const std::string& name, const std::vector<std::string>& deps) {
  nlohmann::json j = {{"name", name}, {"version", "1.0.0"}};
  if (!deps.empty()) {
    nlohmann::json d = nlohmann::json::object();
    for (const auto& dep : deps) d[dep] = "^1.0.0";
    j["dependencies"] = d;
  }
  return j.dump(2);
}

}  // namespace

void write_npm_project(const fs::path& root, const std::string& name,
                       const std::vector<std::string>& root_deps,
                       const std::map<std::string, std::string>& root_files,
                       const std::vector<PackageFixture>& packages) {
  write_text(root / "package.json", manifest_json(name, root_deps));
  write_tree(root, root_files);
  if (!packages.empty() || !root_deps.empty()) fs::create_directories(root / "node_modules");
  for (const auto& p : packages) {
    fs::path dir = root / "node_modules" / p.name;
    write_text(dir / "package.json", manifest_json(p.name, p.deps));
    write_tree(dir, p.files);
  }
}

}  // namespace imgslim::testing
