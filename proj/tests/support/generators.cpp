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


#include "generators.hpp"

#include <algorithm>

namespace imgslim::testing {

namespace {

class Dice {
 public:
  explicit Dice(std::mt19937_64& rng) : rng_(rng) {}
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::size_t below(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }
  int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }
  std::string text(std::size_t max_len) {
    std::string s(below(max_len + 1), ' ');
    for (auto& c : s) c = static_cast<char>('a' + below(26));
    return s;
  }

 private:
  std::mt19937_64& rng_;
};

std::vector<std::string> parts_of(const std::string& p) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < p.size()) {
    auto j = p.find('/', i);
    if (j == std::string::npos) j = p.size();
    if (j > i) out.push_back(p.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

std::string dirname(const std::string& p) {
  auto pos = p.rfind('/');
  return pos == 0 ? "/" : p.substr(0, pos);
}

}  // namespace

std::string relative_target(const std::string& from_dir, const std::string& to) {
  auto a = parts_of(from_dir);
  auto b = parts_of(to);
  std::size_t common = 0;
  while (common < a.size() && common < b.size() && a[common] == b[common]) ++common;
  std::string out;
  for (std::size_t i = common; i < a.size(); ++i) out += "../";
  for (std::size_t i = common; i < b.size(); ++i) out += b[i] + (i + 1 < b.size() ? "/" : "");
  if (out.empty()) return ".";
  if (out.back() == '/') out.pop_back();
  return out;
}

RandomWorld random_world(std::mt19937_64& rng, bool elves) {
  Dice d(rng);
  RandomWorld rw;
  auto& w = rw.world;
  auto& fsb = w.rootfs;
  int counter = 0;
  auto fresh = [&](const char* prefix) { return prefix + std::to_string(counter++); };

  const bool merged = d.coin();
  std::vector<std::string> bin_dirs;
  // Spellings that reach a physical bin dir through a link.
  std::vector<std::pair<std::string, std::string>> alias_of;
  if (merged) {
    fsb.symlink("/bin", "usr/bin").symlink("/sbin", "usr/sbin").symlink("/lib", "usr/lib");
    fsb.dir("/usr/bin").dir("/usr/sbin").dir("/usr/lib");
    bin_dirs = {"/usr/bin", "/usr/sbin"};
    alias_of = {{"/usr/bin", "/bin"}, {"/usr/sbin", "/sbin"}};
  } else {
    fsb.dir("/bin").dir("/sbin").dir("/lib").dir("/usr/bin").dir("/usr/sbin").dir("/usr/lib");
    bin_dirs = {"/bin", "/sbin", "/usr/bin", "/usr/sbin"};
  }
  if (d.coin(0.2)) {
    fsb.dir("/usr/local");
    fsb.symlink("/usr/local/bin", "../bin");
    alias_of.emplace_back("/usr/bin", "/usr/local/bin");
  } else {
    fsb.dir("/usr/local/bin");
    bin_dirs.push_back("/usr/local/bin");
  }
  if (d.coin(0.3)) {
    fsb.symlink("/alt", d.coin() ? "/usr/bin" : "usr/bin");
    alias_of.emplace_back("/usr/bin", "/alt");
    if (d.coin()) {
      fsb.symlink("/usr/alt2", "../alt");
      alias_of.emplace_back("/usr/bin", "/usr/alt2");
    }
  }
  if (d.coin(0.3)) fsb.symlink("/usr/bin/X11", ".");
  if (d.coin(0.2)) fsb.symlink("/opt/tools", "../usr/sbin");

  auto spell = [&](const std::string& physical, const std::string& from_dir) {
    std::string dir = dirname(physical);
    std::string base = physical.substr(dir.size() + (dir == "/" ? 0 : 1));
    switch (d.below(4)) {
      case 0:
        return relative_target(from_dir, physical);
      case 1:
        for (const auto& [phys, alias] : alias_of) {
          if (phys == dir && d.coin()) return alias + "/" + base;
        }
        return physical;
      default:
        return physical;
    }
  };

  // Dynamic linking graph.
  const std::string triplet = "/usr/lib/x86_64-linux-gnu";
  std::vector<std::string> lib_names;
  std::string interp;
  if (elves) {
    fsb.dir(triplet);
    fsb.dir("/lib64");
    ElfSpec ld;
    ld.soname = "ld-linux-x86-64.so.2";
    w.add_elf(triplet + "/ld-linux-x86-64.so.2", ld);
    fsb.symlink("/lib64/ld-linux-x86-64.so.2", triplet + "/ld-linux-x86-64.so.2");
    interp = "/lib64/ld-linux-x86-64.so.2";

    bool conf = d.coin(0.6);
    if (conf) {
      fsb.dir("/usr/local/lib");
      fsb.file("/etc/ld.so.conf", "include /etc/ld.so.conf.d/*.conf\n");
      fsb.file("/etc/ld.so.conf.d/local.conf", "# local\n/usr/local/lib\n");
      w.conf_dirs = {"/usr/local/lib"};
    }
    std::vector<std::string> lib_dirs = {triplet, "/usr/lib"};
    if (conf) lib_dirs.push_back("/usr/local/lib");

    int nlib = d.range(3, 10);
    for (int i = 0; i < nlib; ++i) lib_names.push_back("libr" + std::to_string(i) + ".so.1");
    for (int i = 0; i < nlib; ++i) {
      ElfSpec s;
      s.soname = lib_names[i];
      for (int j = i + 1; j < nlib; ++j) {
        if (d.coin(0.3)) s.needed.push_back(lib_names[j]);
      }
      if (d.coin(0.15)) s.needed.push_back("libmissing" + std::to_string(i) + ".so");
      s.strtab_via_sections = d.coin(0.2);
      const std::string& dir = d.pick(lib_dirs);
      if (d.coin(0.3)) {
        std::string real = dir + "/" + lib_names[i] + ".0.0";
        w.add_elf(real, s, 0644);
        fsb.symlink(dir + "/" + lib_names[i], lib_names[i] + ".0.0");
      } else {
        w.add_elf(dir + "/" + lib_names[i], s, 0644);
      }
      if (d.coin(0.1)) {
        // Wrong-class decoy placed first in the search order.
        ElfSpec decoy = s;
        decoy.elf_class = 32;
        decoy.machine = 3;
        decoy.needed.clear();
        std::string ddir = conf ? "/usr/local/lib" : triplet;
        if (!fsb.has(ddir + "/" + lib_names[i])) w.add_elf(ddir + "/" + lib_names[i], decoy, 0644);
      }
    }
    if (d.coin(0.5)) {
      // Private libraries found only through $ORIGIN.
      ElfSpec priv;
      priv.soname = "libpriv.so";
      if (!lib_names.empty()) priv.needed.push_back(d.pick(lib_names));
      w.add_elf("/opt/app/lib/libpriv.so", priv, 0644);
      ElfSpec app;
      app.interpreter = interp;
      app.needed = {"libpriv.so"};
      if (d.coin()) {
        app.rpath = {"$ORIGIN/../lib"};
      } else {
        app.runpath = {"$ORIGIN/../lib"};
      }
      w.add_elf("/opt/app/bin/app", app);
      fsb.symlink(d.pick(bin_dirs) + "/app", "/opt/app/bin/app");
      rw.command_names.push_back("app");
    }
  }

  // Executables in the search dirs.
  std::vector<std::string> exes;
  int nexe = d.range(5, 25);
  for (int i = 0; i < nexe; ++i) {
    std::string name = fresh("c");
    std::string path = d.pick(bin_dirs) + "/" + name;
    if (elves && d.coin(0.7)) {
      ElfSpec s;
      s.interpreter = interp;
      for (const auto& l : lib_names) {
        if (d.coin(0.25)) s.needed.push_back(l);
      }
      if (d.coin(0.1)) s.needed.push_back("libabsent.so.9");
      w.add_elf(path, s, d.coin(0.9) ? 0755 : 0644);
    } else if (d.coin(0.3)) {
      fsb.file(path, "#!/bin/sh\necho " + name + "\n", 0755);
    } else {
      fsb.file(path, "\x7f" "ELF-stub-" + name, d.coin(0.9) ? 0755 : 0644);
    }
    exes.push_back(path);
    rw.command_names.push_back(name);
  }
  if (d.coin(0.3)) {
    std::string name = fresh("h");
    fsb.hardlink(d.pick(bin_dirs) + "/" + name, d.pick(exes));
    rw.command_names.push_back(name);
  }

  // Link chains, some through an alternatives directory.
  fsb.dir("/etc/alternatives");
  std::vector<std::string> link_dirs = bin_dirs;
  link_dirs.push_back("/etc/alternatives");
  int nchains = d.range(0, 8);
  for (int c = 0; c < nchains; ++c) {
    int len = d.range(1, 6);
    std::string target = d.pick(exes);
    for (int k = 0; k < len; ++k) {
      bool head = k + 1 == len;
      std::string name = fresh("l");
      std::string dir = head ? d.pick(bin_dirs) : d.pick(link_dirs);
      std::string path = dir + "/" + name;
      fsb.symlink(path, spell(target, dir));
      target = path;
      if (head || dir != "/etc/alternatives") rw.command_names.push_back(name);
    }
  }
  // Loops.
  if (d.coin()) {
    std::string name = fresh("s");
    fsb.symlink(d.pick(bin_dirs) + "/" + name, name);
    rw.command_names.push_back(name);
  }
  if (d.coin()) {
    std::string a = d.pick(bin_dirs) + "/" + fresh("p");
    std::string b = d.pick(bin_dirs) + "/" + fresh("q");
    fsb.symlink(a, b);
    fsb.symlink(b, spell(a, dirname(b)));
    rw.command_names.push_back(a.substr(a.rfind('/') + 1));
    rw.command_names.push_back(b.substr(b.rfind('/') + 1));
  }
  if (d.coin()) {
    // Chain into a loop.
    std::string a = d.pick(bin_dirs) + "/" + fresh("m");
    std::string b = d.pick(bin_dirs) + "/" + fresh("n");
    std::string e = d.pick(bin_dirs) + "/" + fresh("o");
    fsb.symlink(e, a).symlink(a, b).symlink(b, a);
    rw.command_names.push_back(e.substr(e.rfind('/') + 1));
  }
  // Dangling and not-a-directory links.
  if (d.coin()) {
    std::string name = fresh("x");
    fsb.symlink(d.pick(bin_dirs) + "/" + name, d.coin() ? "/nonexistent/" + name : "gone" + name);
    rw.command_names.push_back(name);
  }
  if (d.coin(0.3)) {
    std::string name = fresh("t");
    fsb.symlink(d.pick(bin_dirs) + "/" + name, d.pick(exes) + "/sub");
    rw.command_names.push_back(name);
  }
  // A shadowing dangling link earlier in the search order.
  if (d.coin(0.3) && fsb.has("/usr/local/bin")) {
    const auto& rec = fsb.records().at("/usr/local/bin");
    if (rec.kind == FileKind::kDirectory) {
      const std::string& exe = d.pick(exes);
      std::string base = exe.substr(exe.rfind('/') + 1);
      std::string shadow = "/usr/local/bin/" + base;
      if (!fsb.has(shadow)) fsb.symlink(shadow, "/nowhere/" + base);
    }
  }
  // Non-commands in the search dirs.
  if (d.coin(0.3)) fsb.dir(d.pick(bin_dirs) + "/" + fresh("dir"));
  if (d.coin(0.3)) fsb.file(d.pick(bin_dirs) + "/" + fresh("doc"), "plain\n", 0644);

  // Scripts and data outside the protected directories.
  if (d.coin()) fsb.file("/usr/local/share/run.sh", "#!/bin/sh\nexec c0\n", 0755);
  if (d.coin(0.3)) fsb.symlink("/usr/share/editor", "/etc/alternatives/none");
  if (!exes.empty() && d.coin()) fsb.symlink("/opt/entry", spell(d.pick(exes), "/opt"));
  int target = d.range(30, 200);
  while (static_cast<int>(fsb.records().size()) < target - 3) {
    switch (d.below(4)) {
      case 0:
        fsb.file("/etc/" + fresh("conf"), d.text(40));
        break;
      case 1:
        fsb.file("/usr/share/doc/" + fresh("pkg") + "/copyright", d.text(80));
        break;
      case 2:
        fsb.file("/var/lib/" + fresh("state"), d.text(20));
        break;
      default:
        fsb.file(d.pick(std::vector<std::string>{"/usr/lib", "/lib64"}) + "/" + fresh("data"),
                 d.text(60), 0644);
    }
  }
  return rw;
}

std::vector<oracle::Layer> random_layers(std::mt19937_64& rng, int count) {
  Dice d(rng);
  const std::vector<std::string> dirs = {"a", "a/b", "a/b/c", "d", "d/e", "f"};
  const std::vector<std::string> leaves = {"x", "y", "z", "b", "e"};
  const std::vector<std::uint32_t> dir_modes = {0755, 0700, 0750, 0775};
  const std::vector<std::uint32_t> file_modes = {0644, 0600, 0755, 0444, 0640};
  const std::vector<std::string> targets = {"x", "../y", "/a/b", "/d/e/x", ".", "missing"};

  auto any_path = [&] {
    if (d.coin(0.3)) return d.pick(dirs);
    std::string parent = d.coin(0.2) ? "" : d.pick(dirs) + "/";
    return parent + d.pick(leaves);
  };
  auto spelled = [&](const std::string& p) {
    switch (d.below(3)) {
      case 0:
        return "./" + p;
      default:
        return p;
    }
  };

  std::vector<oracle::Layer> layers;
  for (int li = 0; li < count; ++li) {
    oracle::Layer layer;
    if (d.coin(0.1)) layer.push_back({dir_header("./"), {}});
    int n = d.range(5, 20);
    for (int i = 0; i < n; ++i) {
      int kind = d.range(0, li == 0 ? 2 : 4);
      switch (kind) {
        case 0: {
          layer.push_back({dir_header(spelled(d.pick(dirs)), d.pick(dir_modes)), {}});
          break;
        }
        case 1: {
          std::string data = d.text(30);
          layer.push_back({file_header(spelled(any_path()), data.size(), d.pick(file_modes)),
                           data});
          break;
        }
        case 2: {
          layer.push_back({symlink_header(spelled(any_path()), d.pick(targets)), {}});
          break;
        }
        case 3: {
          std::string parent = d.coin(0.2) ? "" : d.pick(dirs) + "/";
          layer.push_back({file_header(parent + ".wh." + d.pick(leaves), 0), {}});
          break;
        }
        default: {
          const std::string& dir = d.pick(dirs);
          if (d.coin(0.8)) layer.push_back({dir_header(dir, d.pick(dir_modes)), {}});
          layer.push_back({file_header(dir + "/.wh..wh..opq", 0), {}});
        }
      }
    }
    layers.push_back(std::move(layer));
  }
  return layers;
}

std::string layer_tar(const oracle::Layer& layer) {
  tar::Writer w;
  for (const auto& e : layer) w.add(e.header, e.data);
  return w.finish();
}

}  // namespace imgslim::testing
