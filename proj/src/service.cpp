#include "pcl/service.hpp"

#include "pcl/problem_io.hpp"
#include "pcl/problems.hpp"

#include "httplib.h"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

namespace pcl {

namespace {

using json = nlohmann::json;

ServiceError bad_request(const std::string& message) { return ServiceError(400, "bad_request", message); }

ServiceError infeasible(const ProblemModel& model, const InfeasibleError& e) {
  json names = json::array();
  for (auto c : e.violated()) names.push_back(model.constraints()[c].name);
  return ServiceError(422, "infeasible", e.what(), {{"violated", names}});
}

// Runs `f`, turning library errors into wire errors.
template <class F>
auto translate(const ProblemModel* model, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ServiceError&) {
    throw;
  } catch (const InfeasibleError& e) {
    if (model) throw infeasible(*model, e);
    throw ServiceError(422, "infeasible", e.what());
  } catch (const ConflictError& e) {
    throw ServiceError(422, "protocol_error", e.what());
  } catch (const DomainError& e) {
    throw ServiceError(422, "invalid_value", e.what());
  } catch (const ModelError& e) {
    throw ServiceError(422, "invalid_model", e.what(), {{"path", e.path()}});
  } catch (const json::exception& e) {
    throw bad_request(e.what());
  }
}

std::string format_id(std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(n));
  return buf;
}

std::optional<std::uint64_t> parse_id(const std::string& id) {
  if (id.size() < 2 || id[0] != 's') return std::nullopt;
  for (std::size_t k = 1; k < id.size(); ++k)
    if (id[k] < '0' || id[k] > '9') return std::nullopt;
  return std::stoull(id.substr(1));
}

void append_line(const std::filesystem::path& path, const json& event) {
  std::ofstream f(path, std::ios::app | std::ios::binary);
  if (!f) throw ServiceError(500, "journal_error", "cannot append to " + path.string());
  f << event.dump() << '\n';
  f.flush();
}

}  // namespace

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::awaiting_improvement:
      return "awaiting-improvement";
    case Phase::inferring:
      return "inferring";
    case Phase::converged:
      return "converged";
  }
  return "?";
}

json context_summary(const ProblemModel& model, const Configuration& x, std::size_t part) {
  const auto& own = model.parts()[part].features;
  std::set<std::size_t> own_set(own.begin(), own.end());
  auto fv = feature_vector(model, x);

  json neighbors = json::array();
  for (std::size_t q = 0; q < model.num_parts(); ++q) {
    if (q == part) continue;
    std::set<std::size_t> shown;
    bool shares = false;
    for (auto i : model.parts()[q].features) {
      if (!own_set.count(i)) continue;
      shares = true;
      if (model.features()[i].global) continue;
      for (auto v : model.features()[i].scope)
        if (model.part_of(v) == q) shown.insert(v);
    }
    if (!shares) continue;
    json values = json::object();
    for (auto v : shown) values[model.variables()[v].name] = x.values[v];
    neighbors.push_back({{"part", model.parts()[q].name}, {"local", !shown.empty()}, {"values", values}});
  }

  json globals = json::array();
  for (std::size_t i = 0; i < model.num_features(); ++i)
    if (model.features()[i].global) globals.push_back({{"name", model.features()[i].name}, {"value", fv[i]}});

  json summaries = json::array();
  const auto& meta = model.metadata();
  if (meta.contains("summaries"))
    for (const auto& s : meta["summaries"]) {
      const std::string feature = s.at("feature").get<std::string>();
      for (std::size_t i = 0; i < model.num_features(); ++i)
        if (model.features()[i].name == feature) {
          summaries.push_back({{"name", s.at("name")}, {"value", fv[i] * s.value("scale", 1.0)}});
          break;
        }
    }
  return {{"part", model.parts()[part].name}, {"neighbors", neighbors}, {"globals", globals}, {"summaries", summaries}};
}

SessionOptions SessionOptions::from_json(const json& doc) {
  if (!doc.is_object()) throw bad_request("request body must be a JSON object");
  SessionOptions o;
  if (!doc.contains("problem")) throw bad_request("missing 'problem'");
  o.problem = doc["problem"].get<std::string>();
  for (const auto& [key, value] : doc.items()) {
    if (key == "problem") continue;
    else if (key == "selection") o.learner.selection = parse_selection(value.get<std::string>());
    else if (key == "seed") o.learner.seed = value.get<std::uint64_t>();
    else if (key == "exploration") o.learner.exploration = value.get<double>();
    else if (key == "mode") o.learner.mode = parse_mode(value.get<std::string>());
    else if (key == "initial") o.initial = value;
    else throw bad_request("unknown option '" + key + "'");
  }
  return o;
}

json SessionOptions::to_json() const {
  return {{"problem", problem},
          {"selection", selection_name(learner.selection)},
          {"seed", learner.seed},
          {"exploration", learner.exploration},
          {"mode", mode_name(learner.mode)},
          {"initial", initial}};
}

Session::Session(std::string id, std::shared_ptr<const ProblemModel> model, SessionOptions options)
    : id_(std::move(id)), model_(std::move(model)), options_(std::move(options)) {
  translate(model_.get(), [&] {
    LearnerOptions lo = options_.learner;
    if (!options_.initial.is_null()) lo.initial = configuration_from_json(*model_, options_.initial);
    learner_ = std::make_unique<PartwiseLearner>(*model_, lo);
    learner_->begin_turn();
    return 0;
  });
  phase_ = Phase::awaiting_improvement;
}

json Session::create_event() const { return {{"event", "create"}, {"id", id_}, {"options", options_.to_json()}}; }

json Session::recommendation_locked() const {
  json out = {{"session", id_}, {"phase", phase_name(phase_)}, {"t", learner_->t() + 1}};
  if (phase_ == Phase::converged) {
    out["t"] = learner_->t();
    out["configuration"] = configuration_to_json(*model_, learner_->x());
    return out;
  }
  const PendingTurn& turn = learner_->pending();
  json variables = json::array();
  for (auto v : turn.recommendation.variables)
    variables.push_back({{"name", model_->variables()[v].name}, {"domain", model_->variables()[v].domain}});
  out["part"] = model_->parts()[turn.part].name;
  out["assignment"] = partial_to_json(*model_, turn.recommendation);
  out["variables"] = variables;
  out["context"] = context_summary(*model_, turn.x, turn.part);
  return out;
}

json Session::recommendation() const {
  std::shared_lock lock(state_mutex_);
  return recommendation_locked();
}

json Session::apply_locked(const json& body) {
  if (!body.is_object()) throw bad_request("request body must be a JSON object");
  if (phase_ == Phase::converged)
    throw ServiceError(409, "converged", "session has converged",
                       {{"configuration", configuration_to_json(*model_, learner_->x())}});
  if (!body.contains("t") || !body["t"].is_number_integer() || body["t"].get<long long>() < 0)
    throw bad_request("missing turn number 't'");
  if (!body.contains("assignment")) throw bad_request("missing 'assignment'");
  const PendingTurn& turn = learner_->pending();
  const std::size_t t = body["t"].get<std::size_t>();
  if (t != turn.t)
    throw ServiceError(409, "stale_turn", "turn " + std::to_string(t) + " is not the pending turn",
                       {{"pending", turn.t}});
  IterationRecord rec = translate(model_.get(), [&] {
    PartialConfiguration improvement = partial_from_json(*model_, turn.part, body["assignment"]);
    return learner_->complete_turn(improvement);
  });
  phase_ = Phase::inferring;
  if (rec.converged) {
    phase_ = Phase::converged;
  } else {
    learner_->begin_turn();
    phase_ = Phase::awaiting_improvement;
  }
  return {{"accepted", true},
          {"t", rec.t},
          {"branch", branch_name(rec.branch)},
          {"satisfied", rec.satisfied},
          {"estimated_gain", rec.estimated_gain},
          {"converged", rec.converged},
          {"phase", phase_name(phase_)}};
}

json Session::submit(const json& body) {
  std::unique_lock turn(turn_mutex_, std::try_to_lock);
  if (!turn.owns_lock()) throw ServiceError(409, "turn_in_progress", "another improvement is being applied");
  std::unique_lock lock(state_mutex_);
  json result = apply_locked(body);
  if (journal_)
    append_line(*journal_, {{"event", "improvement"}, {"t", body["t"]}, {"assignment", body["assignment"]}});
  result["next"] = phase_ == Phase::converged ? json(nullptr) : recommendation_locked();
  return result;
}

json Session::state() const {
  std::shared_lock lock(state_mutex_);
  json trace = json::array();
  for (const auto& r : learner_->trace()) trace.push_back(record_to_json(*model_, r));
  json parts = json::array();
  for (const auto& p : model_->parts()) parts.push_back(p.name);
  return {{"session", id_},
          {"problem", options_.problem},
          {"options", options_.to_json()},
          {"phase", phase_name(phase_)},
          {"t", learner_->t()},
          {"weights", learner_->weights()},
          {"x", configuration_to_json(*model_, learner_->x())},
          {"streak", learner_->streak()},
          {"parts", parts},
          {"converged", learner_->has_converged()},
          {"trace", trace}};
}

SessionManager::SessionManager(std::optional<std::filesystem::path> journal_dir) : journal_dir_(std::move(journal_dir)) {
  if (!journal_dir_) return;
  std::filesystem::create_directories(*journal_dir_);
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(*journal_dir_))
    if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      auto s = restore(f);
      if (auto n = parse_id(s->id())) next_id_ = std::max(next_id_, *n + 1);
      sessions_[s->id()] = std::move(s);
    } catch (const std::exception& e) {
      std::cerr << "skipping journal " << f << ": " << e.what() << "\n";
    }
  }
}

std::shared_ptr<Session> SessionManager::restore(const std::filesystem::path& journal) {
  std::ifstream in(journal);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty journal");
  json create = json::parse(line);
  if (create.at("event") != "create") throw std::runtime_error("journal does not start with a create event");
  SessionOptions options = SessionOptions::from_json(create.at("options"));
  auto session = std::make_shared<Session>(create.at("id").get<std::string>(), problem(options.problem), options);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json event = json::parse(line);
    session->apply_locked(event);
  }
  session->journal_ = journal;
  return session;
}

std::shared_ptr<const ProblemModel> SessionManager::problem(const std::string& ref) const {
  auto names = builtin_problems();
  if (std::find(names.begin(), names.end(), ref) == names.end())
    throw ServiceError(404, "unknown_problem", "unknown problem '" + ref + "'", {{"available", names}});
  std::lock_guard lock(problems_mutex_);
  auto it = problems_.find(ref);
  if (it == problems_.end())
    it = problems_.emplace(ref, std::make_shared<const ProblemModel>(load_problem(ref))).first;
  return it->second;
}

json SessionManager::create(const json& body) {
  SessionOptions options = translate(nullptr, [&] { return SessionOptions::from_json(body); });
  auto model = problem(options.problem);
  std::string id;
  {
    std::unique_lock lock(mutex_);
    id = format_id(next_id_++);
  }
  auto session = std::make_shared<Session>(id, model, options);
  if (journal_dir_) {
    session->journal_ = *journal_dir_ / (id + ".jsonl");
    append_line(*session->journal_, session->create_event());
  }
  {
    std::unique_lock lock(mutex_);
    sessions_[id] = session;
  }
  json out = session->state();
  out["recommendation"] = session->recommendation();
  return out;
}

std::shared_ptr<Session> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "not_found", "no session '" + id + "'");
  return it->second;
}

json SessionManager::recommendation(const std::string& id) const { return find(id)->recommendation(); }

json SessionManager::submit(const std::string& id, const json& body) { return find(id)->submit(body); }

json SessionManager::state(const std::string& id) const { return find(id)->state(); }

void SessionManager::remove(const std::string& id) {
  std::shared_ptr<Session> session;
  {
    std::unique_lock lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ServiceError(404, "not_found", "no session '" + id + "'");
    session = it->second;
    sessions_.erase(it);
  }
  std::unique_lock turn(session->turn_mutex_);
  if (session->journal_) std::filesystem::remove(*session->journal_);
}

json SessionManager::problems() const {
  json out = json::array();
  for (const auto& name : builtin_problems()) {
    auto m = problem(name);
    out.push_back({{"id", name},
                   {"name", m->name()},
                   {"kind", m->metadata().value("kind", "generic")},
                   {"variables", m->num_variables()},
                   {"features", m->num_features()},
                   {"parts", m->num_parts()}});
  }
  return out;
}

std::size_t SessionManager::size() const {
  std::shared_lock lock(mutex_);
  return sessions_.size();
}

void bind_routes(httplib::Server& server, SessionManager& manager) {
  auto reply = [](httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  };
  auto guarded = [reply](auto handler) {
    return [reply, handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const ServiceError& e) {
        reply(res, e.status(), e.body());
      } catch (const json::exception& e) {
        reply(res, 400, bad_request(e.what()).body());
      } catch (const std::exception& e) {
        reply(res, 500, ServiceError(500, "internal", e.what()).body());
      }
    };
  };
  auto parse = [](const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
      return json::parse(req.body);
    } catch (const json::parse_error& e) {
      throw bad_request(std::string("malformed JSON: ") + e.what());
    }
  };

  server.Get("/health", guarded([reply](const httplib::Request&, httplib::Response& res) {
               reply(res, 200, {{"status", "ok"}});
             }));
  server.Get("/problems", guarded([&manager, reply](const httplib::Request&, httplib::Response& res) {
               reply(res, 200, manager.problems());
             }));
  server.Post("/sessions", guarded([&manager, reply, parse](const httplib::Request& req, httplib::Response& res) {
                reply(res, 201, manager.create(parse(req)));
              }));
  server.Get(R"(/sessions/([^/]+)/recommendation)",
             guarded([&manager, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, 200, manager.recommendation(req.matches[1]));
             }));
  server.Post(R"(/sessions/([^/]+)/improvement)",
              guarded([&manager, reply, parse](const httplib::Request& req, httplib::Response& res) {
                reply(res, 200, manager.submit(req.matches[1], parse(req)));
              }));
  server.Get(R"(/sessions/([^/]+)/state)", guarded([&manager, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, 200, manager.state(req.matches[1]));
             }));
  server.Delete(R"(/sessions/([^/]+))", guarded([&manager, reply](const httplib::Request& req, httplib::Response& res) {
                  manager.remove(req.matches[1]);
                  reply(res, 200, {{"deleted", std::string(req.matches[1])}});
                }));
}

}  // namespace pcl
