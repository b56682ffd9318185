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

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "imgslim/error.hpp"
#include "imgslim/rootfs.hpp"

namespace imgslim {

struct ExposedPort {
  std::uint16_t port = 0;
  std::string protocol = "tcp";

  auto operator<=>(const ExposedPort&) const = default;
  std::string to_string() const;
  // Parses "80/tcp" or "80" (tcp implied). Throws FormatError.
  static ExposedPort parse(std::string_view spec);
};

struct ImageMetadata {
  std::string image_name;
  std::string tag;
  std::string architecture;
  std::string os;
  std::set<ExposedPort> exposed_ports;
  std::vector<std::string> env_vars;
  std::optional<std::vector<std::string>> entrypoint;
  std::optional<std::vector<std::string>> cmd;
  std::optional<std::string> working_dir;
  std::map<std::string, std::string> labels;

  bool operator==(const ImageMetadata&) const = default;

  // "name:tag", "name", or "" when the image carries no reference.
  std::string reference() const;
};

// Splits "registry:5000/repo/name:tag" into name and tag. Digest suffixes
// ("@sha256:...") are dropped.
std::pair<std::string, std::string> split_reference(std::string_view ref);

enum class ImageLayout { kDockerSave, kOci };

std::string_view to_string(ImageLayout layout);

struct Layer {
  // Uncompressed layer tar.
  std::shared_ptr<const std::string> tar;
  // sha256 of the uncompressed tar ("diff id").
  std::string diff_id;
  // Digest and media type of the blob as stored in the archive.
  std::string blob_digest;
  std::string media_type;
  bool compressed = false;
};

struct LayerStack {
  // Base layer first.
  std::vector<Layer> layers;
  std::vector<std::string> diff_ids;
};

struct LoadedImage {
  ImageMetadata metadata;
  LayerStack layers;
  ImageLayout layout = ImageLayout::kOci;
};

LoadedImage load_image_archive(const std::filesystem::path& archive_path,
                               Diagnostics* diag = nullptr);
LoadedImage load_image_archive_bytes(std::string_view archive,
                                     Diagnostics* diag = nullptr);

// Applies the layers in order with overlay semantics (later layers win,
// ".wh.<name>" deletes, ".wh..wh..opq" hides lower content of a directory).
FlattenedRootfs flatten_layers(const LayerStack& layers,
                               Diagnostics* diag = nullptr);

struct BuildOptions {
  ImageLayout layout = ImageLayout::kOci;
  bool gzip_layers = false;
};

struct ImageArchive {
  std::string bytes;
  ImageLayout layout = ImageLayout::kOci;
  std::string config_digest;
  std::string layer_diff_id;
  std::string layer_blob_digest;
  std::uint64_t layer_size = 0;

  std::uint64_t size() const { return bytes.size(); }
};

// Wraps a rootfs tar into a single-layer image carrying `metadata`.
// Throws InvalidArgument if the tar has no entries.
ImageArchive build_slim_image(const ImageMetadata& metadata,
                              std::string_view rootfs_tar,
                              const BuildOptions& options = {});

void write_file(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace imgslim
