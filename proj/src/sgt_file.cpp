#include "sgtk/sgt_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "sgtk/errors.hpp"

namespace sgtk {

namespace {

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

constexpr char kMagic[4] = {'S', 'G', 'T', '1'};

template <class T>
void write_pod(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void write_array(std::ostream& os, const std::vector<T>& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           std::streamsize(v.size() * sizeof(T)));
}

template <class T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw IoError("SGT1: truncated header");
  return v;
}

template <class T>
void read_array(std::istream& is, std::vector<T>& v, std::uint64_t count) {
  v.resize(count);
  is.read(reinterpret_cast<char*>(v.data()),
          std::streamsize(count * sizeof(T)));
  if (!is) throw IoError("SGT1: truncated payload");
}

}  // namespace

void save_sgt(const TransformedGraph& t, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write '" + path + "'");
  os.write(kMagic, 4);
  write_pod<std::uint32_t>(os, t.geometry.blk_h);
  write_pod<std::uint32_t>(os, t.geometry.blk_w);
  write_pod<std::uint8_t>(os, t.csr.has_values() ? 1 : 0);
  write_pod<std::uint64_t>(os, t.csr.num_nodes);
  write_pod<std::uint64_t>(os, t.csr.num_edges());
  write_pod<std::uint64_t>(os, t.num_windows());
  write_pod<std::uint64_t>(os, t.block_counter);
  write_array(os, t.csr.node_pointer);
  write_array(os, t.csr.edge_list);
  if (t.csr.has_values()) write_array(os, t.csr.values);
  write_array(os, t.edge_to_row);
  write_array(os, t.edge_to_column);
  write_array(os, t.block_partition);
  write_array(os, t.window_offsets);
  write_array(os, t.window_unique_cols);
  if (!os) throw IoError("write failed for '" + path + "'");
}

TransformedGraph load_sgt(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("SGT1: bad magic in '" + path + "'");

  TransformedGraph t;
  t.geometry.blk_h = read_pod<std::uint32_t>(is);
  t.geometry.blk_w = read_pod<std::uint32_t>(is);
  const std::uint8_t flags = read_pod<std::uint8_t>(is);
  const auto num_nodes = read_pod<std::uint64_t>(is);
  const auto num_edges = read_pod<std::uint64_t>(is);
  const auto num_windows = read_pod<std::uint64_t>(is);
  t.block_counter = read_pod<std::uint64_t>(is);
  if (t.geometry.blk_h == 0 || t.geometry.blk_w == 0)
    throw IoError("SGT1: zero tile geometry");

  t.csr.num_nodes = std::size_t(num_nodes);
  read_array(is, t.csr.node_pointer, num_nodes + 1);
  read_array(is, t.csr.edge_list, num_edges);
  if (flags & 1) read_array(is, t.csr.values, num_edges);
  read_array(is, t.edge_to_row, num_edges);
  read_array(is, t.edge_to_column, num_edges);
  read_array(is, t.block_partition, num_windows);
  read_array(is, t.window_offsets, num_windows + 1);
  if (t.window_offsets.front() != 0)
    throw IoError("SGT1: corrupt window offsets");
  read_array(is, t.window_unique_cols, t.window_offsets.back());

  if (is.get() != std::ifstream::traits_type::eof())
    throw IoError("SGT1: trailing bytes in '" + path + "'");

  validate_csr(t.csr);
  if (t.csr.node_pointer.back() != num_edges)
    throw IoError("SGT1: inconsistent edge count");
  return t;
}

}  // namespace sgtk
