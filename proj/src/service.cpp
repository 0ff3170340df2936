#include "scenmine/service.hpp"

#include <random>
#include <sstream>

#include "httplib.h"
#include "scenmine/errors.hpp"
#include "scenmine/format.hpp"

namespace scenmine {

using nlohmann::json;

struct Service::Session {
  struct StoredSearch {
    std::shared_ptr<const TrajectoryStore> store;
    PipelineResult result;
  };

  std::string id;
  Clock::time_point last_used;
  std::mutex mutex;
  std::map<std::string, std::shared_ptr<const TrajectoryStore>> recordings;
  std::vector<ScenarioQuery> queries;
  std::vector<StoredSearch> searches;
  int next_recording = 1;
};

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message,
                json extra = json::object()) {
  extra["error"] = message;
  send_json(res, status, extra);
}

std::string random_token() {
  std::random_device rd;
  std::ostringstream out;
  for (int i = 0; i < 4; ++i) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(rd()));
    out << buf;
  }
  return out.str();
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("request body is not valid JSON: ") + e.what());
  }
}

struct ScenarioRef {
  std::size_t search = 0;
  std::size_t index = 0;
};

ScenarioRef parse_scenario_id(const std::string& id) {
  const auto dash = id.find('-');
  if (dash == std::string::npos) throw NotFoundError("unknown scenario '" + id + "'");
  const auto s = parse_integer(std::string_view(id).substr(0, dash));
  const auto i = parse_integer(std::string_view(id).substr(dash + 1));
  if (!s || !i || *s < 0 || *i < 0) throw NotFoundError("unknown scenario '" + id + "'");
  return {static_cast<std::size_t>(*s), static_cast<std::size_t>(*i)};
}

json vehicle_state(const TrackSample& s, VehicleId id, const char* role) {
  return {{"id", id},
          {"role", role},
          {"x", s.x},
          {"y", s.y},
          {"width", s.width},
          {"height", s.height},
          {"center_x", s.center_x()},
          {"center_y", s.center_y()},
          {"lane_id", s.lane_id},
          {"x_velocity", s.x_velocity},
          {"y_velocity", s.y_velocity}};
}

}  // namespace

Service::Service(ServiceConfig config, TransportFactory transport_factory, Now now)
    : config_(std::move(config)), transport_factory_(std::move(transport_factory)), now_(std::move(now)) {
  if (!(config_.idle_timeout_seconds > 0.0)) throw InputError("idle timeout must be positive");
  if (config_.default_stride == 0) throw InputError("default stride must be at least 1");
  config_.export_config.validate();
}

Service::~Service() = default;

std::string Service::create_session() {
  auto session = std::make_shared<Session>();
  session->id = random_token();
  session->last_used = now_();
  std::lock_guard lock(mutex_);
  sessions_[session->id] = session;
  return session->id;
}

std::size_t Service::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::size_t Service::expire_idle() {
  const auto now = now_();
  const auto limit = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(config_.idle_timeout_seconds));
  std::lock_guard lock(mutex_);
  return std::erase_if(sessions_, [&](const auto& kv) { return now - kv.second->last_used > limit; });
}

std::shared_ptr<Service::Session> Service::session_for(const std::string& id) {
  if (id.empty()) {
    const auto created = create_session();
    std::lock_guard lock(mutex_);
    return sessions_.at(created);
  }
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("unknown or expired session");
  it->second->last_used = now_();
  return it->second;
}

void Service::mount(httplib::Server& server) {
  using Handler = std::function<void(Session&, const httplib::Request&, httplib::Response&)>;
  const auto route = [this](Handler body) {
    return [this, body](const httplib::Request& req, httplib::Response& res) {
      try {
        expire_idle();
        auto session = session_for(req.get_header_value("X-Session-Id"));
        res.set_header("X-Session-Id", session->id);
        body(*session, req, res);
      } catch (const SchemaError& e) {
        send_error(res, 400, e.what(), {{"column", e.column()}});
      } catch (const NotFoundError& e) {
        send_error(res, 404, e.what());
      } catch (const ProviderError& e) {
        send_error(res, 502, e.what(), {{"raw_response", e.last_raw_response()}});
      } catch (const TransportError& e) {
        send_error(res, 502, e.what());
      } catch (const CredentialError& e) {
        send_error(res, 502, e.what());
      } catch (const VocabularyError& e) {
        send_error(res, 422, e.what(), {{"label", e.label()}});
      } catch (const ValidationError& e) {
        send_error(res, 422, e.what(), {{"violations", e.violations()}});
      } catch (const ResponseFormatError& e) {
        send_error(res, 422, e.what());
      } catch (const InterpretationError& e) {
        send_error(res, 422, e.what());
      } catch (const ExportError& e) {
        send_error(res, 422, e.what());
      } catch (const UndecidableDirectionError& e) {
        send_error(res, 422, e.what());
      } catch (const Error& e) {
        send_error(res, 400, e.what());
      } catch (const json::exception& e) {
        send_error(res, 400, std::string("bad request: ") + e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, e.what());
      }
    };
  };

  server.Post("/api/sessions", route([](Session& s, const httplib::Request&, httplib::Response& res) {
                send_json(res, 201, {{"session_id", s.id}});
              }));

  server.Post("/api/recordings", route([](Session& s, const httplib::Request& req,
                                          httplib::Response& res) {
    std::string csv;
    std::string requested_id;
    std::string file_stem;
    std::string frame_rate_text;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("file")) throw InputError("multipart upload needs a 'file' field");
      const auto file = req.get_file_value("file");
      csv = file.content;
      file_stem = std::filesystem::path(file.filename).stem().string();
      if (req.has_file("recording_id")) requested_id = req.get_file_value("recording_id").content;
      if (req.has_file("frame_rate")) frame_rate_text = req.get_file_value("frame_rate").content;
    } else {
      csv = req.body;
      requested_id = req.get_param_value("recording_id");
      frame_rate_text = req.get_param_value("frame_rate");
    }
    RecordingConfig rc;
    if (!frame_rate_text.empty()) {
      const auto fr = parse_double(frame_rate_text);
      if (!fr) throw InputError("frame_rate must be a number");
      rc.frame_rate = *fr;
    }

    std::lock_guard lock(s.mutex);
    if (!requested_id.empty()) {
      if (s.recordings.count(requested_id) != 0) {
        send_error(res, 409, "recording '" + requested_id + "' already exists");
        return;
      }
      rc.recording_id = requested_id;
    } else {
      std::string base = file_stem.empty() ? "rec" + std::to_string(s.next_recording) : file_stem;
      std::string id = base;
      for (int n = 2; s.recordings.count(id) != 0; ++n) id = base + "-" + std::to_string(n);
      rc.recording_id = id;
    }
    ++s.next_recording;
    std::istringstream in(csv);
    auto store = std::make_shared<const TrajectoryStore>(parse_tracks_csv(in, rc));
    if (store->track_count() == 0) throw InputError("no data rows");
    const auto range = *store->frame_range();
    s.recordings[rc.recording_id] = store;
    send_json(res, 201, {{"recording_id", rc.recording_id},
                         {"track_count", store->track_count()},
                         {"frame_range", json::array({range.first, range.last})}});
  }));

  server.Get("/api/recordings", route([](Session& s, const httplib::Request&, httplib::Response& res) {
               std::lock_guard lock(s.mutex);
               json list = json::array();
               for (const auto& [id, store] : s.recordings) {
                 const auto range = *store->frame_range();
                 list.push_back({{"recording_id", id},
                                 {"track_count", store->track_count()},
                                 {"frame_rate", store->frame_rate()},
                                 {"frame_range", json::array({range.first, range.last})}});
               }
               send_json(res, 200, list);
             }));

  server.Post("/api/interpret", route([this](Session& s, const httplib::Request& req,
                                             httplib::Response& res) {
    const json body = parse_body(req);
    if (!body.is_object() || !body.contains("description") || !body["description"].is_string()) {
      throw InputError("'description' must be a string");
    }
    const std::string provider = body.value("provider", std::string("offline"));
    ExtractConfig cfg;
    cfg.provider = parse_provider_kind(provider);
    cfg.provider_config = config_.provider;
    std::unique_ptr<ChatTransport> transport;
    if (cfg.provider == ProviderKind::Remote && transport_factory_) transport = transport_factory_();
    const auto resolution = resolve_query(body["description"].get<std::string>(), cfg, transport.get());
    {
      std::lock_guard lock(s.mutex);
      s.queries.push_back(resolution.query);
    }
    send_json(res, 200, to_json(resolution.query));
  }));

  server.Post("/api/search", route([](Session& s, const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    if (!body.is_object()) throw InputError("request body must be a JSON object");
    if (!body.contains("recording_id") || !body["recording_id"].is_string()) {
      throw InputError("'recording_id' must be a string");
    }
    if (!body.contains("query")) throw InputError("'query' is required");
    std::shared_ptr<const TrajectoryStore> store;
    {
      std::lock_guard lock(s.mutex);
      const auto it = s.recordings.find(body["recording_id"].get<std::string>());
      if (it == s.recordings.end()) {
        throw NotFoundError("unknown recording '" + body["recording_id"].get<std::string>() + "'");
      }
      store = it->second;
    }
    const ScenarioQuery query = query_from_json(body["query"]);
    ExtractConfig cfg;
    cfg.frame_rate = store->frame_rate();
    if (body.contains("search_params") && !body["search_params"].is_null()) {
      cfg.search = search_params_from_json(body["search_params"]);
    }
    if (body.contains("criticality_config") && !body["criticality_config"].is_null()) {
      cfg.criticality = criticality_from_json(body["criticality_config"]);
    }
    if (body.contains("metric_params") && !body["metric_params"].is_null()) {
      cfg.metric_params = metric_params_from_json(body["metric_params"]);
    }
    // The search runs without the session lock; stores are immutable.
    auto result = run_search(*store, query, cfg);
    const json out = to_json(result);
    std::size_t search_id = 0;
    {
      std::lock_guard lock(s.mutex);
      search_id = s.searches.size();
      s.searches.push_back({store, std::move(result)});
    }
    res.set_header("X-Search-Id", std::to_string(search_id));
    send_json(res, 200, out);
  }));

  const auto find_scenario = [](Session& s, const std::string& id) {
    const auto ref = parse_scenario_id(id);
    std::lock_guard lock(s.mutex);
    if (ref.search >= s.searches.size() || ref.index >= s.searches[ref.search].result.pool.size()) {
      throw NotFoundError("unknown scenario '" + id + "'");
    }
    const auto& stored = s.searches[ref.search];
    return std::make_pair(stored.store, stored.result.pool[ref.index]);
  };

  server.Get(R"(/api/scenarios/([^/]+)/frames)",
             route([this, find_scenario](Session& s, const httplib::Request& req, httplib::Response& res) {
               const auto [store, entry] = find_scenario(s, req.matches[1]);
               std::size_t stride = config_.default_stride;
               if (req.has_param("stride")) {
                 const auto v = parse_integer(req.get_param_value("stride"));
                 if (!v || *v < 1) throw InputError("stride must be a positive integer");
                 stride = static_cast<std::size_t>(*v);
               }
               const auto& m = entry.match;
               const auto& ego = store->get(m.ego_id);
               json states = json::array();
               for (FrameIndex f = m.scenario_window.first; f <= m.scenario_window.last;
                    f += static_cast<FrameIndex>(stride)) {
                 json vehicles = json::array();
                 if (ego.covers(f)) vehicles.push_back(vehicle_state(ego.at_frame(f), m.ego_id, "ego"));
                 for (const auto& t : m.targets) {
                   const auto& tr = store->get(t.target_id);
                   if (tr.covers(f)) vehicles.push_back(vehicle_state(tr.at_frame(f), t.target_id, "target"));
                 }
                 json metrics = json::array();
                 for (const auto& r : entry.reports) {
                   json value = nullptr;
                   if (r.window.contains(f)) {
                     const auto& v = r.series[static_cast<std::size_t>(f - r.window.first)];
                     if (v) value = *v;
                   }
                   metrics.push_back({{"target_id", r.target_id},
                                      {"metric", std::string(name(r.kind))},
                                      {"value", value}});
                 }
                 states.push_back({{"frame", f},
                                   {"time", static_cast<double>(f - m.scenario_window.first) / store->frame_rate()},
                                   {"vehicles", vehicles},
                                   {"metrics", metrics}});
               }
               json match = to_json(m);
               send_json(res, 200, {{"scenario_id", std::string(req.matches[1])},
                                    {"match", match},
                                    {"selected", entry.passes},
                                    {"stride", stride},
                                    {"states", states}});
             }));

  server.Get(R"(/api/scenarios/([^/]+)/export)",
             route([this, find_scenario](Session& s, const httplib::Request& req, httplib::Response& res) {
               const std::string id = req.matches[1];
               const auto format = req.get_param_value("format");
               if (format != "xosc" && format != "cmtxt") {
                 throw InputError("format must be xosc or cmtxt");
               }
               const auto [store, entry] = find_scenario(s, id);
               const auto f = parse_export_format(format);
               const std::string filename = "scenario_" + id + std::string(file_extension(f));
               if (f == ExportFormat::Xosc) {
                 res.set_content(to_openscenario(entry.match, *store, config_.export_config), "application/xml");
               } else {
                 res.set_content(to_carmaker_text(entry.match, *store, config_.export_config), "text/plain");
               }
               res.set_header("Content-Disposition", "attachment; filename=\"" + filename + "\"");
               res.status = 200;
             }));
}

void serve(Service& service, const std::string& host, int port) {
  httplib::Server server;
  service.mount(server);
  if (!server.listen(host, port)) {
    throw Error("cannot listen on " + host + ":" + std::to_string(port));
  }
}

}  // namespace scenmine
