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

#include "imgslim/image.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "imgslim/digest.hpp"
#include "imgslim/gzip.hpp"
#include "imgslim/path.hpp"
#include "imgslim/tar.hpp"

namespace imgslim {

using nlohmann::json;

namespace {

constexpr std::string_view kOciIndexType = "application/vnd.oci.image.index.v1+json";
constexpr std::string_view kOciManifestType = "application/vnd.oci.image.manifest.v1+json";
constexpr std::string_view kOciConfigType = "application/vnd.oci.image.config.v1+json";
constexpr std::string_view kOciLayerTar = "application/vnd.oci.image.layer.v1.tar";
constexpr std::string_view kOciLayerGzip = "application/vnd.oci.image.layer.v1.tar+gzip";
constexpr std::string_view kDockerManifestType = "application/vnd.docker.distribution.manifest.v2+json";
constexpr std::string_view kDockerListType = "application/vnd.docker.distribution.manifest.list.v2+json";
constexpr std::string_view kDockerConfigType = "application/vnd.docker.container.image.v1+json";
constexpr std::string_view kDockerLayerTar = "application/vnd.docker.image.rootfs.diff.tar";
constexpr std::string_view kDockerLayerGzip = "application/vnd.docker.image.rootfs.diff.tar.gzip";

constexpr std::string_view kWhiteoutPrefix = ".wh.";
constexpr std::string_view kOpaqueMarker = ".wh..wh..opq";

// Member name -> content for regular members of the outer archive.
using MemberMap = std::unordered_map<std::string, std::string_view>;

std::string clean_member_name(std::string_view name) {
  while (name.starts_with("./")) name.remove_prefix(2);
  while (name.starts_with('/')) name.remove_prefix(1);
  while (name.ends_with('/')) name.remove_suffix(1);
  return std::string(name);
}

MemberMap index_members(std::string_view archive,
                        const std::vector<tar::Entry>& entries) {
  MemberMap members;
  for (const auto& e : entries) {
    if (e.header.type != tar::EntryType::kRegular) continue;
    members[clean_member_name(e.header.name)] = tar::content(archive, e);
  }
  return members;
}

std::string_view require_member(const MemberMap& members, const std::string& name) {
  auto it = members.find(clean_member_name(name));
  if (it == members.end()) {
    throw FormatError("image archive is missing member '" + name + "'");
  }
  return it->second;
}

json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(what + ": invalid JSON (" + e.what() + ")");
  }
}

std::optional<std::vector<std::string>> string_list(const json& obj,
                                                    const char* key) {
  if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) {
    return std::nullopt;
  }
  const auto& v = obj.at(key);
  if (v.is_string()) return std::vector<std::string>{v.get<std::string>()};
  if (!v.is_array()) throw FormatError(std::string("config: ") + key + " must be a list");
  std::vector<std::string> out;
  for (const auto& item : v) out.push_back(item.get<std::string>());
  return out;
}

ImageMetadata metadata_from_config(const json& config) {
  if (!config.is_object()) throw FormatError("config: not a JSON object");
  ImageMetadata md;
  md.architecture = config.value("architecture", "");
  md.os = config.value("os", "");
  if (md.architecture.empty()) throw FormatError("config: missing architecture");
  if (md.os.empty()) throw FormatError("config: missing os");
  json cfg = config.contains("config") && config.at("config").is_object()
                 ? config.at("config")
                 : json::object();
  if (cfg.contains("ExposedPorts") && cfg.at("ExposedPorts").is_object()) {
    for (const auto& [spec, _] : cfg.at("ExposedPorts").items()) {
      md.exposed_ports.insert(ExposedPort::parse(spec));
    }
  }
  md.env_vars = string_list(cfg, "Env").value_or(std::vector<std::string>{});
  md.entrypoint = string_list(cfg, "Entrypoint");
  md.cmd = string_list(cfg, "Cmd");
  if (cfg.contains("WorkingDir") && cfg.at("WorkingDir").is_string() &&
      !cfg.at("WorkingDir").get<std::string>().empty()) {
    md.working_dir = cfg.at("WorkingDir").get<std::string>();
  }
  if (cfg.contains("Labels") && cfg.at("Labels").is_object()) {
    for (const auto& [k, v] : cfg.at("Labels").items()) {
      md.labels[k] = v.get<std::string>();
    }
  }
  return md;
}

std::vector<std::string> diff_ids_from_config(const json& config) {
  std::vector<std::string> ids;
  if (config.contains("rootfs") && config.at("rootfs").contains("diff_ids")) {
    for (const auto& d : config.at("rootfs").at("diff_ids")) {
      ids.push_back(d.get<std::string>());
    }
  }
  return ids;
}

struct RawLayer {
  std::string_view blob;
  std::string blob_digest;  // empty when the layout does not record one
  std::string media_type;
  std::string member;
};

// Decompresses every layer (in parallel) and checks diff ids.
LayerStack materialize_layers(const std::vector<RawLayer>& raw,
                              const std::vector<std::string>& diff_ids) {
  if (raw.size() != diff_ids.size()) {
    throw FormatError("image lists " + std::to_string(raw.size()) +
                      " layers but config records " +
                      std::to_string(diff_ids.size()) + " diff_ids");
  }
  std::vector<std::future<Layer>> jobs;
  jobs.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&, i] {
      const RawLayer& r = raw[i];
      if (!r.blob_digest.empty()) verify_digest(r.blob, r.blob_digest, r.member);
      Layer layer;
      layer.compressed = is_gzip(r.blob);
      layer.tar = std::make_shared<const std::string>(
          layer.compressed ? gzip_decompress(r.blob) : std::string(r.blob));
      verify_digest(*layer.tar, diff_ids[i], "diff_id of " + r.member);
      layer.diff_id = diff_ids[i];
      layer.blob_digest = r.blob_digest.empty() ? sha256_digest(r.blob) : r.blob_digest;
      layer.media_type = r.media_type;
      return layer;
    }));
  }
  LayerStack stack;
  for (auto& job : jobs) stack.layers.push_back(job.get());
  stack.diff_ids = diff_ids;
  return stack;
}

bool looks_like_blob_path(std::string_view member, std::string& digest) {
  std::string name = clean_member_name(member);
  if (name.starts_with("blobs/sha256/")) {
    digest = "sha256:" + name.substr(13);
    return digest.size() == 7 + 64;
  }
  if (name.size() == 64 + 5 && name.ends_with(".json")) {
    digest = "sha256:" + name.substr(0, 64);
    return true;
  }
  return false;
}

LoadedImage load_docker_save(const MemberMap& members, Diagnostics* diag) {
  json manifest = parse_json(require_member(members, "manifest.json"), "manifest.json");
  if (!manifest.is_array() || manifest.empty()) {
    throw FormatError("manifest.json: expected a non-empty array");
  }
  if (manifest.size() > 1) {
    warn(diag, "image-io", "manifest.json lists " + std::to_string(manifest.size()) +
                               " images; using the first");
  }
  const json& entry = manifest.at(0);
  if (!entry.contains("Config") || !entry.contains("Layers")) {
    throw FormatError("manifest.json: entry lacks Config or Layers");
  }
  std::string config_member = entry.at("Config").get<std::string>();
  std::string_view config_bytes = require_member(members, config_member);
  std::string config_digest;
  if (looks_like_blob_path(config_member, config_digest)) {
    verify_digest(config_bytes, config_digest, config_member);
  }
  json config = parse_json(config_bytes, config_member);

  LoadedImage image;
  image.layout = ImageLayout::kDockerSave;
  image.metadata = metadata_from_config(config);
  if (entry.contains("RepoTags") && entry.at("RepoTags").is_array() &&
      !entry.at("RepoTags").empty()) {
    auto [name, tag] = split_reference(entry.at("RepoTags").at(0).get<std::string>());
    image.metadata.image_name = name;
    image.metadata.tag = tag;
  }

  std::vector<RawLayer> raw;
  for (const auto& l : entry.at("Layers")) {
    std::string member = l.get<std::string>();
    RawLayer r;
    r.member = member;
    r.blob = require_member(members, member);
    std::string digest;
    if (clean_member_name(member).starts_with("blobs/") &&
        looks_like_blob_path(member, digest)) {
      r.blob_digest = digest;
    }
    r.media_type = is_gzip(r.blob) ? kDockerLayerGzip : kDockerLayerTar;
    raw.push_back(std::move(r));
  }
  image.layers = materialize_layers(raw, diff_ids_from_config(config));
  return image;
}

std::string blob_member(const std::string& digest) {
  auto parts = parse_digest(digest);
  return "blobs/" + parts.algorithm + "/" + parts.encoded;
}

std::string_view read_blob(const MemberMap& members, const json& descriptor,
                           const std::string& what) {
  if (!descriptor.contains("digest")) {
    throw FormatError(what + ": descriptor without digest");
  }
  std::string digest = descriptor.at("digest").get<std::string>();
  std::string member = blob_member(digest);
  std::string_view bytes = require_member(members, member);
  verify_digest(bytes, digest, member);
  if (descriptor.contains("size") &&
      descriptor.at("size").get<std::uint64_t>() != bytes.size()) {
    throw IntegrityError(member + ": size " + std::to_string(bytes.size()) +
                         " differs from descriptor size " +
                         std::to_string(descriptor.at("size").get<std::uint64_t>()));
  }
  return bytes;
}

void require_schema_v2(const json& doc, const std::string& what) {
  if (!doc.is_object() || !doc.contains("schemaVersion")) {
    throw FormatError(what + ": missing schemaVersion");
  }
  int version = doc.at("schemaVersion").get<int>();
  if (version != 2) {
    throw UnsupportedFormatError(what + ": unsupported schemaVersion " +
                                 std::to_string(version));
  }
}

bool is_attestation(const json& descriptor) {
  if (!descriptor.contains("annotations")) return false;
  const auto& ann = descriptor.at("annotations");
  return ann.contains("vnd.docker.reference.type") &&
         ann.at("vnd.docker.reference.type") == "attestation-manifest";
}

// Picks the single image manifest out of an index, following one level of
// nesting. Multi-platform indexes are rejected.
json select_manifest_descriptor(const MemberMap& members, const json& index,
                                Diagnostics* diag, int depth = 0) {
  require_schema_v2(index, depth == 0 ? "index.json" : "nested index");
  if (!index.contains("manifests") || !index.at("manifests").is_array()) {
    throw FormatError("index.json: missing manifests array");
  }
  std::vector<json> candidates;
  for (const auto& d : index.at("manifests")) {
    if (!is_attestation(d)) candidates.push_back(d);
  }
  if (candidates.empty()) throw FormatError("index.json: no image manifests");
  if (candidates.size() > 1) {
    if (depth > 0) {
      throw UnsupportedFormatError("multi-platform image index is not supported");
    }
    warn(diag, "image-io", "index.json lists " + std::to_string(candidates.size()) +
                               " manifests; using the first");
  }
  json descriptor = candidates.front();
  std::string media = descriptor.value("mediaType", std::string(kOciManifestType));
  if (media == kOciIndexType || media == kDockerListType) {
    if (depth > 0) throw UnsupportedFormatError("index nested more than one level");
    json nested = parse_json(read_blob(members, descriptor, "nested index"), "nested index");
    json inner = select_manifest_descriptor(members, nested, diag, depth + 1);
    // Keep the outer annotations (they carry the image name).
    if (descriptor.contains("annotations") && !inner.contains("annotations")) {
      inner["annotations"] = descriptor.at("annotations");
    }
    return inner;
  }
  if (media != kOciManifestType && media != kDockerManifestType) {
    throw UnsupportedFormatError("index.json: unsupported manifest media type '" +
                                 media + "'");
  }
  return descriptor;
}

LoadedImage load_oci(const MemberMap& members, Diagnostics* diag) {
  json layout = parse_json(require_member(members, "oci-layout"), "oci-layout");
  std::string version = layout.value("imageLayoutVersion", "");
  if (!version.starts_with("1.")) {
    throw UnsupportedFormatError("oci-layout: unsupported imageLayoutVersion '" +
                                 version + "'");
  }
  json index = parse_json(require_member(members, "index.json"), "index.json");
  json descriptor = select_manifest_descriptor(members, index, diag);
  json manifest = parse_json(read_blob(members, descriptor, "manifest"), "manifest");
  require_schema_v2(manifest, "manifest");
  if (manifest.contains("mediaType")) {
    std::string media = manifest.at("mediaType").get<std::string>();
    if (media != kOciManifestType && media != kDockerManifestType) {
      throw UnsupportedFormatError("manifest: unsupported media type '" + media + "'");
    }
  }
  if (!manifest.contains("config") || !manifest.contains("layers")) {
    throw FormatError("manifest: missing config or layers");
  }
  const json& config_desc = manifest.at("config");
  std::string config_media = config_desc.value("mediaType", std::string(kOciConfigType));
  if (config_media != kOciConfigType && config_media != kDockerConfigType) {
    throw UnsupportedFormatError("manifest: unsupported config media type '" +
                                 config_media + "'");
  }
  json config = parse_json(read_blob(members, config_desc, "config"), "config");

  LoadedImage image;
  image.layout = ImageLayout::kOci;
  image.metadata = metadata_from_config(config);
  if (descriptor.contains("annotations")) {
    const auto& ann = descriptor.at("annotations");
    if (ann.contains("io.containerd.image.name")) {
      auto [name, tag] = split_reference(ann.at("io.containerd.image.name").get<std::string>());
      image.metadata.image_name = name;
      image.metadata.tag = tag;
    } else if (ann.contains("org.opencontainers.image.ref.name")) {
      std::string ref = ann.at("org.opencontainers.image.ref.name").get<std::string>();
      if (ref.find_first_of(":/") != std::string::npos) {
        auto [name, tag] = split_reference(ref);
        image.metadata.image_name = name;
        image.metadata.tag = tag;
      } else {
        image.metadata.tag = ref;
      }
    }
  }

  std::vector<RawLayer> raw;
  for (const auto& d : manifest.at("layers")) {
    std::string media = d.value("mediaType", "");
    if (media != kOciLayerTar && media != kOciLayerGzip && media != kDockerLayerTar &&
        media != kDockerLayerGzip) {
      throw UnsupportedFormatError("manifest: unsupported layer media type '" + media + "'");
    }
    RawLayer r;
    r.blob = read_blob(members, d, "layer");
    r.blob_digest = d.at("digest").get<std::string>();
    r.media_type = media;
    r.member = blob_member(r.blob_digest);
    raw.push_back(std::move(r));
  }
  image.layers = materialize_layers(raw, diff_ids_from_config(config));
  return image;
}

}  // namespace

std::string ExposedPort::to_string() const {
  return std::to_string(port) + "/" + protocol;
}

ExposedPort ExposedPort::parse(std::string_view spec) {
  ExposedPort p;
  auto slash = spec.find('/');
  std::string_view num = spec.substr(0, slash);
  if (slash != std::string_view::npos) p.protocol = std::string(spec.substr(slash + 1));
  unsigned long value = 0;
  try {
    std::size_t used = 0;
    value = std::stoul(std::string(num), &used);
    if (used != num.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw FormatError("invalid exposed port '" + std::string(spec) + "'");
  }
  if (value == 0 || value > 65535 || p.protocol.empty()) {
    throw FormatError("invalid exposed port '" + std::string(spec) + "'");
  }
  p.port = static_cast<std::uint16_t>(value);
  return p;
}

std::string ImageMetadata::reference() const {
  if (image_name.empty()) return tag;
  return tag.empty() ? image_name : image_name + ":" + tag;
}

std::pair<std::string, std::string> split_reference(std::string_view ref) {
  auto at = ref.find('@');
  if (at != std::string_view::npos) ref = ref.substr(0, at);
  auto slash = ref.rfind('/');
  auto colon = ref.rfind(':');
  if (colon != std::string_view::npos &&
      (slash == std::string_view::npos || colon > slash)) {
    return {std::string(ref.substr(0, colon)), std::string(ref.substr(colon + 1))};
  }
  return {std::string(ref), ""};
}

std::string_view to_string(ImageLayout layout) {
  return layout == ImageLayout::kOci ? "oci" : "docker";
}

LoadedImage load_image_archive_bytes(std::string_view archive, Diagnostics* diag) {
  auto entries = tar::read(archive);
  MemberMap members = index_members(archive, entries);
  try {
    if (members.contains("index.json") && members.contains("oci-layout")) {
      return load_oci(members, diag);
    }
    if (members.contains("manifest.json")) return load_docker_save(members, diag);
  } catch (const json::exception& e) {
    throw FormatError(std::string("image metadata: ") + e.what());
  }
  throw FormatError(
      "image archive is missing member 'manifest.json' (docker-save) or "
      "'index.json' + 'oci-layout' (OCI layout)");
}

LoadedImage load_image_archive(const std::filesystem::path& archive_path,
                               Diagnostics* diag) {
  std::string bytes = read_file(archive_path);
  return load_image_archive_bytes(bytes, diag);
}

// ---------------------------------------------------------------------------
// Flattening

namespace {

// Converts a layer member name into an absolute rootfs path. Returns "" for
// the root directory itself.
std::string member_path(std::string_view name) {
  std::string out;
  for (const auto& seg : vpath::components(name)) {
    if (seg == ".") continue;
    if (seg == "..") {
      throw SecurityError("tar member '" + std::string(name) +
                          "' escapes the root with '..'");
    }
    out += '/';
    out += seg;
  }
  return out;
}

void erase_subtree(std::map<std::string, FileRecord>& entries,
                   const std::string& dir, bool include_self) {
  if (include_self) entries.erase(dir);
  std::string prefix = dir + "/";
  auto it = entries.lower_bound(prefix);
  while (it != entries.end() && it->first.starts_with(prefix)) {
    it = entries.erase(it);
  }
}

FileRecord synthetic_dir(const std::string& path) {
  FileRecord d;
  d.path = path;
  d.kind = FileKind::kDirectory;
  d.mode = 0755;
  return d;
}

void ensure_parents(std::map<std::string, FileRecord>& entries,
                    const std::string& path) {
  for (const auto& dir : vpath::ancestors(path)) {
    auto it = entries.find(dir);
    if (it != entries.end() && it->second.kind == FileKind::kDirectory) continue;
    if (it != entries.end()) entries.erase(it);
    entries.emplace(dir, synthetic_dir(dir));
  }
}

}  // namespace

FlattenedRootfs flatten_layers(const LayerStack& stack, Diagnostics* diag) {
  FlattenedRootfs fs;
  auto& entries = fs.entries;
  for (std::size_t li = 0; li < stack.layers.size(); ++li) {
    const auto& buffer = stack.layers[li].tar;
    std::string_view archive = *buffer;
    auto members = tar::read(archive);

    struct Pending {
      std::string path;
      const tar::Entry* entry;
    };
    std::vector<Pending> additions;
    std::vector<std::string> whiteouts;
    std::vector<std::string> opaque_dirs;

    for (const auto& m : members) {
      std::string path = member_path(m.header.name);
      if (path.empty()) continue;
      std::string base = vpath::basename(path);
      std::string dir = vpath::parent(path);
      auto skip = [&](const std::string& why) {
        std::string msg = "layer " + std::to_string(li) + ": " + path + " (" + why + ")";
        warn(diag, "flatten", msg);
        fs.skipped.push_back(std::move(msg));
      };
      if (base == kOpaqueMarker) {
        opaque_dirs.push_back(dir);
        continue;
      }
      if (base.starts_with(kWhiteoutPrefix)) {
        std::string target = base.substr(kWhiteoutPrefix.size());
        if (target.starts_with(kWhiteoutPrefix)) {
          skip("aufs metadata");
          continue;
        }
        whiteouts.push_back(vpath::join(dir, target));
        continue;
      }
      if (m.header.type == tar::EntryType::kUnknown) {
        skip(std::string("unknown tar type '") + m.header.typeflag + "'");
        continue;
      }
      additions.push_back({std::move(path), &m});
    }

    // Markers only affect lower layers, so apply them before this layer's
    // own content regardless of member order.
    for (const auto& dir : opaque_dirs) erase_subtree(entries, dir == "/" ? "" : dir, false);
    for (const auto& target : whiteouts) erase_subtree(entries, target, true);

    for (const auto& add : additions) {
      const tar::Header& h = add.entry->header;
      FileRecord rec;
      rec.path = add.path;
      rec.mode = h.mode;
      rec.uid = h.uid;
      rec.gid = h.gid;
      rec.mtime = h.mtime;
      rec.uname = h.uname;
      rec.gname = h.gname;
      rec.extra_pax = h.extra_pax;
      switch (h.type) {
        case tar::EntryType::kRegular:
          rec.kind = FileKind::kRegular;
          rec.size = h.size;
          rec.content = Blob{buffer, add.entry->data_offset, h.size};
          break;
        case tar::EntryType::kDirectory:
          rec.kind = FileKind::kDirectory;
          break;
        case tar::EntryType::kSymlink:
          rec.kind = FileKind::kSymlink;
          rec.link_target = h.link_name;
          rec.size = h.link_name.size();
          break;
        case tar::EntryType::kHardlink: {
          rec.kind = FileKind::kHardlink;
          std::string target = member_path(h.link_name);
          if (target.empty()) throw FormatError("hard link to the root directory: " + add.path);
          rec.link_target = target;
          auto it = entries.find(target);
          if (it != entries.end() && it->second.is_file()) {
            rec.content = it->second.content;
            rec.size = it->second.size;
          } else {
            warn(diag, "flatten", "layer " + std::to_string(li) + ": hard link " +
                                      add.path + " -> " + target + " has no file target");
          }
          break;
        }
        case tar::EntryType::kCharDevice:
        case tar::EntryType::kBlockDevice:
          rec.kind = FileKind::kDevice;
          rec.device_type = h.type == tar::EntryType::kBlockDevice ? '4' : '3';
          rec.devmajor = h.devmajor;
          rec.devminor = h.devminor;
          break;
        case tar::EntryType::kFifo:
          rec.kind = FileKind::kFifo;
          break;
        case tar::EntryType::kUnknown:
          break;
      }

      ensure_parents(entries, rec.path);
      auto it = entries.find(rec.path);
      if (it != entries.end()) {
        bool old_dir = it->second.kind == FileKind::kDirectory;
        bool new_dir = rec.kind == FileKind::kDirectory;
        if (old_dir && !new_dir) erase_subtree(entries, rec.path, false);
        it->second = std::move(rec);
      } else {
        entries.emplace(rec.path, std::move(rec));
      }
    }
  }
  return fs;
}

// ---------------------------------------------------------------------------
// Building

namespace {

json config_json(const ImageMetadata& md, const std::string& diff_id) {
  json cfg = json::object();
  if (!md.env_vars.empty()) cfg["Env"] = md.env_vars;
  if (md.entrypoint) cfg["Entrypoint"] = *md.entrypoint;
  if (md.cmd) cfg["Cmd"] = *md.cmd;
  if (md.working_dir) cfg["WorkingDir"] = *md.working_dir;
  if (!md.exposed_ports.empty()) {
    json ports = json::object();
    for (const auto& p : md.exposed_ports) ports[p.to_string()] = json::object();
    cfg["ExposedPorts"] = ports;
  }
  if (!md.labels.empty()) cfg["Labels"] = md.labels;

  json config = json::object();
  config["architecture"] = md.architecture;
  config["os"] = md.os;
  config["created"] = "1970-01-01T00:00:00Z";
  config["config"] = cfg;
  config["rootfs"] = {{"type", "layers"}, {"diff_ids", json::array({diff_id})}};
  config["history"] = json::array({{{"created", "1970-01-01T00:00:00Z"},
                                    {"created_by", "imgslim"},
                                    {"comment", "slim rootfs"}}});
  return config;
}

void add_member(tar::Writer& w, const std::string& name, std::string_view bytes) {
  tar::Header h;
  h.name = name;
  h.mode = 0644;
  h.type = tar::EntryType::kRegular;
  w.add(h, bytes);
}

void add_dir(tar::Writer& w, const std::string& name) {
  tar::Header h;
  h.name = name;
  h.mode = 0755;
  h.type = tar::EntryType::kDirectory;
  w.add(h);
}

}  // namespace

ImageArchive build_slim_image(const ImageMetadata& metadata,
                              std::string_view rootfs_tar,
                              const BuildOptions& options) {
  if (tar::read(rootfs_tar).empty()) {
    throw InvalidArgument("refusing to build an image from an empty rootfs tar");
  }
  ImageArchive out;
  out.layout = options.layout;
  out.layer_diff_id = sha256_digest(rootfs_tar);
  std::string layer_blob = options.gzip_layers ? gzip_compress(rootfs_tar)
                                               : std::string(rootfs_tar);
  out.layer_blob_digest = sha256_digest(layer_blob);
  out.layer_size = layer_blob.size();
  std::string config = config_json(metadata, out.layer_diff_id).dump();
  out.config_digest = sha256_digest(config);

  std::string layer_hex = parse_digest(out.layer_blob_digest).encoded;
  std::string config_hex = parse_digest(out.config_digest).encoded;
  std::string ref = metadata.reference();

  tar::Writer w;
  if (options.layout == ImageLayout::kOci) {
    json manifest = {
        {"schemaVersion", 2},
        {"mediaType", kOciManifestType},
        {"config", {{"mediaType", kOciConfigType}, {"digest", out.config_digest},
                    {"size", config.size()}}},
        {"layers", json::array({{{"mediaType", options.gzip_layers ? kOciLayerGzip : kOciLayerTar},
                                 {"digest", out.layer_blob_digest},
                                 {"size", layer_blob.size()}}})}};
    std::string manifest_bytes = manifest.dump();
    std::string manifest_digest = sha256_digest(manifest_bytes);
    json descriptor = {{"mediaType", kOciManifestType},
                       {"digest", manifest_digest},
                       {"size", manifest_bytes.size()}};
    json annotations = json::object();
    if (!metadata.image_name.empty()) annotations["io.containerd.image.name"] = ref;
    if (!metadata.tag.empty()) annotations["org.opencontainers.image.ref.name"] = metadata.tag;
    if (!annotations.empty()) descriptor["annotations"] = annotations;
    json index = {{"schemaVersion", 2},
                  {"mediaType", kOciIndexType},
                  {"manifests", json::array({descriptor})}};
    // docker-compatible manifest.json alongside the OCI index so that
    // `docker load` accepts the archive on older engines too.
    json docker_manifest = json::array({{{"Config", "blobs/sha256/" + config_hex},
                                         {"RepoTags", ref.empty() || metadata.image_name.empty()
                                                          ? json::array()
                                                          : json::array({ref})},
                                         {"Layers", json::array({"blobs/sha256/" + layer_hex})}}});

    std::map<std::string, std::string> blobs = {
        {config_hex, config},
        {layer_hex, layer_blob},
        {parse_digest(manifest_digest).encoded, manifest_bytes}};
    add_dir(w, "blobs");
    add_dir(w, "blobs/sha256");
    for (const auto& [hex, bytes] : blobs) add_member(w, "blobs/sha256/" + hex, bytes);
    add_member(w, "index.json", index.dump());
    add_member(w, "manifest.json", docker_manifest.dump());
    add_member(w, "oci-layout", R"({"imageLayoutVersion":"1.0.0"})");
  } else {
    json docker_manifest = json::array({{{"Config", config_hex + ".json"},
                                         {"RepoTags", metadata.image_name.empty()
                                                          ? json::array()
                                                          : json::array({ref})},
                                         {"Layers", json::array({layer_hex + "/layer.tar"})}}});
    add_member(w, config_hex + ".json", config);
    add_dir(w, layer_hex);
    add_member(w, layer_hex + "/VERSION", "1.0");
    add_member(w, layer_hex + "/layer.tar", layer_blob);
    add_member(w, "manifest.json", docker_manifest.dump());
  }
  out.bytes = w.finish();
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace imgslim
