#pragma once

#include <fstream>
#include <string>

namespace critperc {

// Writes to "<path>.tmp" and renames onto path in commit(). An uncommitted
// file is removed on destruction, so readers never observe a partial write.
class AtomicFile {
 public:
  explicit AtomicFile(std::string path);
  ~AtomicFile();
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ofstream& stream() { return out_; }
  const std::string& path() const { return path_; }
  void commit();

 private:
  std::string path_;
  std::string tmp_path_;
  std::ofstream out_;
  bool committed_ = false;
};

}  // namespace critperc
