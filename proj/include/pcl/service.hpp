#pragma once

#include "pcl/learner.hpp"
#include "pcl/model.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>

namespace httplib {
class Server;
}

namespace pcl {

/// Error carried to the wire as {code, message, details}.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, std::string code, const std::string& message,
               nlohmann::json details = nlohmann::json::object())
      : std::runtime_error(message), status_(status), code_(std::move(code)), details_(std::move(details)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }
  const nlohmann::json& details() const { return details_; }
  nlohmann::json body() const { return {{"code", code_}, {"message", what()}, {"details", details_}}; }

 private:
  int status_;
  std::string code_;
  nlohmann::json details_;
};

enum class Phase { awaiting_improvement, inferring, converged };

const char* phase_name(Phase p);

/// What the user sees next to the recommended part: the parts it shares
/// features with, and the global features as named scalars.
nlohmann::json context_summary(const ProblemModel& model, const Configuration& x, std::size_t part);

struct SessionOptions {
  std::string problem;
  LearnerOptions learner;
  nlohmann::json initial;  // null: default initial configuration

  static SessionOptions from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

class Session {
 public:
  Session(std::string id, std::shared_ptr<const ProblemModel> model, SessionOptions options);

  const std::string& id() const { return id_; }
  nlohmann::json recommendation() const;
  // `body` = {"t": turn, "assignment": {variable: value} | [values]}.
  nlohmann::json submit(const nlohmann::json& body);
  nlohmann::json state() const;
  nlohmann::json create_event() const;

 private:
  friend class SessionManager;
  nlohmann::json recommendation_locked() const;
  nlohmann::json apply_locked(const nlohmann::json& body);

  std::string id_;
  std::shared_ptr<const ProblemModel> model_;
  SessionOptions options_;
  std::unique_ptr<PartwiseLearner> learner_;
  Phase phase_ = Phase::inferring;
  mutable std::shared_mutex state_mutex_;
  std::mutex turn_mutex_;  // one submission in flight
  std::optional<std::filesystem::path> journal_;
};

/// Owns live sessions. With a journal directory every session appends its
/// creation and accepted improvements to <dir>/<id>.jsonl and is replayed
/// from there on construction.
class SessionManager {
 public:
  explicit SessionManager(std::optional<std::filesystem::path> journal_dir = std::nullopt);

  nlohmann::json create(const nlohmann::json& body);
  nlohmann::json recommendation(const std::string& id) const;
  nlohmann::json submit(const std::string& id, const nlohmann::json& body);
  nlohmann::json state(const std::string& id) const;
  void remove(const std::string& id);
  nlohmann::json problems() const;
  std::size_t size() const;

 private:
  std::shared_ptr<Session> find(const std::string& id) const;
  std::shared_ptr<const ProblemModel> problem(const std::string& ref) const;
  std::shared_ptr<Session> restore(const std::filesystem::path& journal);

  std::optional<std::filesystem::path> journal_dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  mutable std::map<std::string, std::shared_ptr<const ProblemModel>> problems_;
  mutable std::mutex problems_mutex_;
  std::uint64_t next_id_ = 1;
};

// Registers the HTTP routes on `server`.
void bind_routes(httplib::Server& server, SessionManager& manager);

}  // namespace pcl
