// Copyright 2026 The Typelink Authors.
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

// HTTP routes over DesignService.
//
//   GET  /health
//   POST /sessions
//   GET  /sessions/{id}
//   PUT  /sessions/{id}/rules
//   POST /sessions/{id}/whatif
//   GET  /sessions/{id}/relations?query=&limit=
//   GET  /sessions/{id}/errors?group=&page=

#ifndef TYPELINK_HTTP_HPP_
#define TYPELINK_HTTP_HPP_

#include <string>

#include <httplib.h>
#include <json.hpp>

#include "typelink/service.hpp"

namespace typelink {

namespace detail {

inline void reply(httplib::Response& res, const ServiceResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json; charset=utf-8");
}

inline bool parse_body(const httplib::Request& req, httplib::Response& res, nlohmann::json& out) {
  try {
    out = nlohmann::json::parse(req.body);
    return true;
  } catch (const nlohmann::json::parse_error& e) {
    reply(res, {400, error_body(ErrorCode::kParse, e.what(), "$")});
    return false;
  }
}

inline std::size_t query_number(const httplib::Request& req, const std::string& key, std::size_t fallback) {
  if (!req.has_param(key)) return fallback;
  std::size_t value = 0;
  if (!parse_number(req.get_param_value(key), value)) {
    throw Error(ErrorCode::kInvalidArgument, "query parameter must be a non-negative integer", key);
  }
  return value;
}

}  // namespace detail

inline void register_routes(httplib::Server& server, DesignService& service) {
  using detail::reply;
  server.Get("/health", [&](const httplib::Request&, httplib::Response& res) { reply(res, service.health()); });
  server.Post("/sessions", [&](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    if (detail::parse_body(req, res, body)) reply(res, service.create_session(body));
  });
  server.Get(R"(/sessions/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.get_session(req.matches[1]));
  });
  server.Put(R"(/sessions/([^/]+)/rules)", [&](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    if (detail::parse_body(req, res, body)) reply(res, service.put_rules(req.matches[1], body));
  });
  server.Post(R"(/sessions/([^/]+)/whatif)", [&](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    if (detail::parse_body(req, res, body)) reply(res, service.whatif(req.matches[1], body));
  });
  server.Get(R"(/sessions/([^/]+)/relations)", [&](const httplib::Request& req, httplib::Response& res) {
    try {
      reply(res, service.relations(req.matches[1], req.get_param_value("query"), detail::query_number(req, "limit", 50)));
    } catch (const Error& e) {
      reply(res, {400, error_body(e.code(), e.message(), e.path())});
    }
  });
  server.Get(R"(/sessions/([^/]+)/errors)", [&](const httplib::Request& req, httplib::Response& res) {
    try {
      reply(res, service.errors(req.matches[1], req.get_param_value("group"), detail::query_number(req, "page", 0)));
    } catch (const Error& e) {
      reply(res, {400, error_body(e.code(), e.message(), e.path())});
    }
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      res.set_content(error_body(ErrorCode::kNotFound, "no such endpoint").dump(), "application/json; charset=utf-8");
    }
  });
}

}  // namespace typelink

#endif  // TYPELINK_HTTP_HPP_
