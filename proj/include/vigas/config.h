// include/vigas/config.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_CONFIG_H_
#define VIGAS_CONFIG_H_

#include <map>
#include <string>
#include <vector>

#include "vigas/dataset.h"
#include "vigas/net.h"
#include "vigas/train.h"

namespace vigas {

// Flat key=value configuration text: one pair per line, '#' comments,
// whitespace trimmed. Unknown keys are rejected by the appliers below.
class KeyValueConfig {
 public:
  static KeyValueConfig load(const std::string& path);
  static KeyValueConfig from_string(const std::string& text);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  uint64_t get_uint64(const std::string& key, uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Throws InvalidConfig naming every key not in `known`.
  void check_known(const std::vector<std::string>& known) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

// Canonical key lists, shared by the appliers, --help, and the resolved
// config dumps.
std::vector<std::string> train_config_keys();    // TrainConfig + net.* keys
std::vector<std::string> dataset_config_keys();

void apply_config(const KeyValueConfig& kv, TrainConfig* train, NetConfig* net);
void apply_config(const KeyValueConfig& kv, DatasetConfig* dataset);

// key=value dumps that round-trip through the parser.
std::string dump_config(const TrainConfig& train, const NetConfig& net);
std::string dump_config(const DatasetConfig& dataset);

}  // namespace vigas

#endif  // VIGAS_CONFIG_H_
