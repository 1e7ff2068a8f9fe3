#include "glv/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <algorithm>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "glv/errors.hpp"

namespace glv {

namespace {

constexpr char kMagic[4] = {'G', 'L', 'F', '1'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), c, c + n);
  }
  void u8(std::uint8_t v) { out.push_back(v); }
  void u32(std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out.push_back(std::uint8_t(v >> s));
  }
  void f64(double v) {
    const auto b = std::bit_cast<std::uint64_t>(v);
    for (int s = 0; s < 64; s += 8) out.push_back(std::uint8_t(b >> s));
  }
  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}
  void need(std::size_t n) const {
    if (pos_ + n > b_.size()) {
      std::ostringstream os;
      os << "truncated payload at byte " << b_.size();
      throw FormatError(os.str());
    }
  }
  std::uint8_t u8() {
    need(1);
    return b_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int s = 0; s < 4; ++s) v |= std::uint32_t(b_[pos_++]) << (8 * s);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int s = 0; s < 8; ++s) v |= std::uint64_t(b_[pos_++]) << (8 * s);
    return std::bit_cast<double>(v);
  }
  std::size_t pos() const { return pos_; }
  std::size_t size() const { return b_.size(); }

 private:
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_field(const ComplexField& u) {
  const GridSpec& g = u.grid();
  Writer w;
  w.bytes(kMagic, 4);
  const int dim = g.dim();
  w.u32(std::uint32_t(dim));
  w.u32(std::uint32_t(g.nx));
  w.u32(std::uint32_t(g.ny));
  if (dim == 3) w.u32(std::uint32_t(g.nt));
  w.f64(g.h);
  w.f64(u.epsilon());
  w.u8(std::uint8_t(g.topology));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  w.out.reserve(w.out.size() + 16 * g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (u.active(n)) {
      w.f64(u[n].real());
      w.f64(u[n].imag());
    } else {
      w.f64(nan);
      w.f64(nan);
    }
  }
  return std::move(w.out);
}

ComplexField decode_field(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  r.need(4);
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("magic mismatch: not a GLF1 file");
  for (int q = 0; q < 4; ++q) r.u8();
  const std::uint32_t dim = r.u32();
  if (dim != 2 && dim != 3) throw FormatError("dimension must be 2 or 3");
  GridSpec g;
  g.nx = r.u32();
  g.ny = r.u32();
  g.nt = dim == 3 ? r.u32() : 1;
  g.h = r.f64();
  const double eps = r.f64();
  const std::uint8_t topo = r.u8();
  if (topo > 2) throw FormatError("unknown topology code " + std::to_string(topo));
  g.topology = Topology(topo);
  if ((dim == 3) != (g.topology == Topology::cylinder)) {
    std::ostringstream os;
    os << "topology code " << int(topo) << " does not match dimension " << dim;
    throw FormatError(os.str());
  }
  if (g.nx < 8 || g.ny < 8 || g.nt < 1 || !(g.h > 0.0))
    throw FormatError("invalid grid header");
  g.origin_x = -0.5 * double(g.nx - 1) * g.h;
  g.origin_y = -0.5 * double(g.ny - 1) * g.h;
  const std::size_t N = g.size();
  if ((r.size() - r.pos()) / 16 < N) {
    std::ostringstream os;
    os << "truncated payload at byte " << r.size();
    throw FormatError(os.str());
  }
  std::vector<cplx> v(N);
  std::vector<std::uint8_t> mask(N, 1);
  for (std::size_t n = 0; n < N; ++n) {
    const double re = r.f64(), im = r.f64();
    const bool a = std::isnan(re), b = std::isnan(im);
    if (a != b) throw FormatError("NaN in active region at node " + std::to_string(n));
    if (a) {
      mask[n] = 0;
    } else {
      v[n] = {re, im};
    }
  }
  if (r.pos() != r.size()) throw FormatError("trailing bytes after payload");

  // infer the disk mask (centre 0, else the centroid of the active nodes),
  // then require the stored mask to match it
  const std::size_t np = g.plane_size();
  std::vector<std::uint8_t> plane(np, 0);
  bool any_masked = false;
  for (std::size_t n = 0; n < N; ++n) {
    if (mask[n]) plane[n % np] = 1;
    else any_masked = true;
  }
  if (g.topology == Topology::rectangle && any_masked)
    throw FormatError("NaN in active region of a rectangle field");
  auto fit = [&](Point2 c) {
    GridSpec t = g;
    t.disk_center = c;
    double d2 = 0.0;
    for (std::size_t p = 0; p < np; ++p)
      if (plane[p]) {
        const double dx = g.x(p % g.nx) - c.x, dy = g.y(p / g.nx) - c.y;
        d2 = std::max(d2, dx * dx + dy * dy);
      }
    // a hair above the farthest node so that it tests inside after rounding
    t.disk_radius = std::sqrt(d2) * (1.0 + 1e-14);
    return t;
  };
  if (g.topology == Topology::disk || (g.topology == Topology::cylinder && any_masked)) {
    GridSpec t = fit({});
    if (t.active_mask() != mask) {
      double sx = 0, sy = 0, sn = 0;
      for (std::size_t p = 0; p < np; ++p)
        if (plane[p]) {
          sx += g.x(p % g.nx);
          sy += g.y(p / g.nx);
          sn += 1;
        }
      if (sn > 0) t = fit({sx / sn, sy / sn});
    }
    if (!(t.disk_radius > 0.0)) throw FormatError("disk field has no active node");
    g = t;
  }
  const auto geo = g.active_mask();
  for (std::size_t n = 0; n < N; ++n)
    if (geo[n] != mask[n]) throw FormatError("NaN in active region at node " + std::to_string(n));
  try {
    return ComplexField(g, eps, std::move(v), std::move(mask));
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("invalid field: ") + e.what());
  }
}

void dump_field(const ComplexField& u, const std::filesystem::path& path) {
  const auto b = encode_field(u);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(b.data()), std::streamsize(b.size()));
  if (!f) throw Error("write failed: " + path.string());
}

ComplexField load_field(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> b((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_field(b);
}

}  // namespace glv
