#include "ddf/hand/skeleton.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ddf {
namespace {

constexpr std::string_view kRestSkeleton = R"(# Rest hand skeleton in MANO joint order (21 joints, metres).
# Wrist at the origin, fingers along +x, palm facing -z.
# Bone lengths follow average adult phalanx and metacarpal lengths.
ddf-skeleton 1
joints 21
0 -1 0.000 0.000 0.000 wrist
1 0 0.095 0.025 0.000 index1
2 1 0.135 0.027 0.000 index2
3 2 0.158 0.028 0.000 index3
4 0 0.097 0.003 0.000 middle1
5 4 0.141 0.003 0.000 middle2
6 5 0.168 0.003 0.000 middle3
7 0 0.082 -0.037 0.000 pinky1
8 7 0.112 -0.041 0.000 pinky2
9 8 0.130 -0.043 0.000 pinky3
10 0 0.090 -0.018 0.000 ring1
11 10 0.130 -0.020 0.000 ring2
12 11 0.155 -0.021 0.000 ring3
13 0 0.025 0.030 -0.005 thumb1
14 13 0.050 0.055 -0.010 thumb2
15 14 0.075 0.070 -0.012 thumb3
16 15 0.097 0.080 -0.013 thumb_tip
17 3 0.178 0.029 0.000 index_tip
18 6 0.190 0.003 0.000 middle_tip
19 12 0.176 -0.022 0.000 ring_tip
20 9 0.148 -0.045 0.000 pinky_tip
)";

[[noreturn]] void fail_at(int line, const std::string& what) {
  throw std::invalid_argument("skeleton line " + std::to_string(line) + ": " + what);
}

}  // namespace

int HandSkeleton::root() const {
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (parent[i] < 0) return static_cast<int>(i);
  }
  return -1;
}

std::vector<Bone> HandSkeleton::bones() const {
  std::vector<Bone> out;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (parent[i] >= 0) out.push_back({static_cast<int>(i), parent[i]});
  }
  return out;
}

std::vector<std::vector<int>> HandSkeleton::children() const {
  std::vector<std::vector<int>> out(parent.size());
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (parent[i] >= 0) out[parent[i]].push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> HandSkeleton::articulated_joints() const {
  const auto kids = children();
  std::vector<int> out;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (parent[i] >= 0 && !kids[i].empty()) out.push_back(static_cast<int>(i));
  }
  return out;
}

void HandSkeleton::validate() const {
  const std::size_t n = joints.size();
  if (n == 0) throw std::invalid_argument("skeleton has no joints");
  if (parent.size() != n || frames.size() != n) {
    throw std::invalid_argument("skeleton joints/parent/frames sizes differ");
  }
  int roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!joints[i].allFinite()) {
      throw std::invalid_argument("joint " + std::to_string(i) + " is not finite");
    }
    if (parent[i] < 0) {
      ++roots;
      continue;
    }
    // Parents precede children, which also rules out cycles.
    if (parent[i] >= static_cast<int>(i)) {
      throw std::invalid_argument("joint " + std::to_string(i) + " parent must have a lower index");
    }
    if (!((joints[i] - joints[parent[i]]).norm() > 0.0)) {
      throw std::invalid_argument("bone ending at joint " + std::to_string(i) + " has zero length");
    }
  }
  if (roots != 1) throw std::invalid_argument("skeleton must have exactly one root");
  for (std::size_t i = 0; i < n; ++i) {
    const Mat3& f = frames[i];
    if ((f.transpose() * f - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-7 ||
        f.determinant() < 0.0) {
      throw std::invalid_argument("frame of joint " + std::to_string(i) + " is not a rotation");
    }
  }
}

std::vector<Mat3> compute_rest_frames(const std::vector<Vec3>& joints,
                                      const std::vector<int>& parent) {
  const std::size_t n = joints.size();
  std::vector<int> first_child(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const int p = parent[i];
    if (p >= 0 && first_child[p] < 0) first_child[p] = static_cast<int>(i);
  }
  std::vector<Mat3> frames(n, Mat3::Identity());
  for (std::size_t i = 0; i < n; ++i) {
    if (parent[i] < 0) continue;
    const Vec3 bone = first_child[i] >= 0 ? Vec3(joints[first_child[i]] - joints[i])
                                          : Vec3(joints[i] - joints[parent[i]]);
    const Vec3 x = bone.normalized();
    Vec3 z = x.cross(Vec3::UnitZ());
    if (z.norm() < 1e-6) z = x.cross(Vec3::UnitY());
    z.normalize();
    const Vec3 y = z.cross(x);
    frames[i].col(0) = x;
    frames[i].col(1) = y;
    frames[i].col(2) = z;
  }
  return frames;
}

HandSkeleton make_skeleton(std::vector<Vec3> joints, std::vector<int> parent) {
  if (joints.size() != parent.size()) {
    throw std::invalid_argument("joint and parent counts differ");
  }
  HandSkeleton s;
  s.frames = compute_rest_frames(joints, parent);
  s.joints = std::move(joints);
  s.parent = std::move(parent);
  s.validate();
  return s;
}

HandSkeleton parse_skeleton(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  int stage = 0;  // 0: expect version, 1: expect count, 2: joints
  std::size_t expected = 0;
  std::vector<Vec3> joints;
  std::vector<int> parent;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (stage == 0) {
      int version = 0;
      if (word != "ddf-skeleton" || !(ls >> version)) fail_at(line_no, "expected 'ddf-skeleton 1'");
      if (version != 1) fail_at(line_no, "unsupported version " + std::to_string(version));
      stage = 1;
    } else if (stage == 1) {
      long long count = 0;
      if (word != "joints" || !(ls >> count) || count < 1) {
        fail_at(line_no, "expected 'joints <N>'");
      }
      expected = static_cast<std::size_t>(count);
      stage = 2;
    } else {
      std::istringstream js(line);
      long long index = 0;
      long long par = 0;
      double x = 0, y = 0, z = 0;
      if (!(js >> index >> par >> x >> y >> z)) fail_at(line_no, "malformed joint line");
      if (index != static_cast<long long>(joints.size())) {
        fail_at(line_no, "joint indices must be consecutive from 0");
      }
      if (joints.size() >= expected) fail_at(line_no, "more joints than declared");
      joints.emplace_back(x, y, z);
      parent.push_back(static_cast<int>(par));
    }
  }
  if (stage < 2) throw std::invalid_argument("skeleton header missing");
  if (joints.size() != expected) {
    throw std::invalid_argument("skeleton declares " + std::to_string(expected) +
                                " joints but lists " + std::to_string(joints.size()));
  }
  return make_skeleton(std::move(joints), std::move(parent));
}

HandSkeleton load_skeleton(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open skeleton file " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_skeleton(buf.str());
}

std::string format_skeleton(const HandSkeleton& skeleton) {
  std::ostringstream out;
  out.precision(17);
  out << "ddf-skeleton 1\njoints " << skeleton.joint_count() << "\n";
  for (std::size_t i = 0; i < skeleton.joint_count(); ++i) {
    const Vec3& p = skeleton.joints[i];
    out << i << ' ' << skeleton.parent[i] << ' ' << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  }
  return out.str();
}

std::string_view default_rest_skeleton_text() { return kRestSkeleton; }

HandSkeleton default_rest_skeleton() { return parse_skeleton(kRestSkeleton); }

}  // namespace ddf
