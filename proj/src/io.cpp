#include "critperc/io.hpp"

#include <cstdio>
#include <filesystem>
#include <system_error>

#include "critperc/error.hpp"

namespace critperc {

AtomicFile::AtomicFile(std::string path) : path_(std::move(path)), tmp_path_(path_ + ".tmp") {
  out_.open(tmp_path_, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot open '" + tmp_path_ + "' for writing");
}

AtomicFile::~AtomicFile() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(tmp_path_, ec);
  }
}

void AtomicFile::commit() {
  out_.flush();
  if (!out_) throw IoError("write failed for '" + tmp_path_ + "'");
  out_.close();
  std::error_code ec;
  std::filesystem::rename(tmp_path_, path_, ec);
  if (ec) throw IoError("cannot rename '" + tmp_path_ + "' to '" + path_ + "': " + ec.message());
  committed_ = true;
}

}  // namespace critperc
