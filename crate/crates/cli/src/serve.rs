//! Local JSON endpoint: `POST /render`, `POST /metrics`, `GET /schema`.

use pattern_forge::{RenderOptions, SpecError};

use crate::{metrics, render, CliError, Request, SCHEMA};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub content_type: &'static str,
    pub body: Vec<u8>,
}

impl Response {
    fn json(status: u16, body: String) -> Self {
        Response {
            status,
            content_type: "application/json",
            body: body.into_bytes(),
        }
    }

    fn error(status: u16, e: &SpecError) -> Self {
        Response::json(status, e.to_json())
    }
}

fn failure(e: CliError) -> Response {
    match e {
        CliError::Spec(s) => Response::error(400, &s),
        other => Response::json(500, other.report()),
    }
}

/// Routes one request. `seed` is the server-wide override; a per-request seed wins over it.
pub fn handle(method: &str, path: &str, body: &[u8], seed: Option<u64>) -> Response {
    let path = path.split('?').next().unwrap_or(path);
    match (method, path) {
        ("GET", "/schema") => Response::json(200, SCHEMA.to_string()),
        ("POST", "/render") => match Request::parse(body) {
            Err(e) => Response::error(400, &e),
            Ok((req, spec, host)) => {
                let defaults = RenderOptions::default();
                let opts = RenderOptions {
                    padding: req.padding.unwrap_or(defaults.padding),
                    precision: req.precision.unwrap_or(defaults.precision),
                    ..defaults
                };
                match render(&spec, &host, req.seed.or(seed), &opts) {
                    Ok(svg) => Response {
                        status: 200,
                        content_type: "image/svg+xml",
                        body: svg.into_bytes(),
                    },
                    Err(e) => failure(e),
                }
            }
        },
        ("POST", "/metrics") => match Request::parse(body) {
            Err(e) => Response::error(400, &e),
            Ok((req, spec, host)) => match metrics(&spec, &host, req.seed.or(seed), req.supersample.unwrap_or(4)) {
                Ok(m) => Response::json(200, m.to_json()),
                Err(e) => failure(e),
            },
        },
        (_, "/schema" | "/render" | "/metrics") => {
            Response::error(405, &SpecError::invariant("", format!("method {method} not allowed on {path}")))
        }
        _ => Response::error(404, &SpecError::invariant("", format!("no route {path}"))),
    }
}

/// Serves until the process is stopped.
pub fn run(addr: &str, seed: Option<u64>) -> Result<(), CliError> {
    let server = tiny_http::Server::http(addr).map_err(|e| CliError::Io(format!("{addr}: {e}")))?;
    eprintln!("listening on http://{}", server.server_addr());
    for mut request in server.incoming_requests() {
        let mut body = Vec::new();
        let resp = match request.as_reader().read_to_end(&mut body) {
            Ok(_) => handle(request.method().as_str(), request.url(), &body, seed),
            Err(e) => Response::error(400, &SpecError::schema("", e.to_string())),
        };
        let header = tiny_http::Header::from_bytes("Content-Type", resp.content_type).expect("static header");
        let out = tiny_http::Response::from_data(resp.body)
            .with_status_code(resp.status)
            .with_header(header);
        let _ = request.respond(out);
    }
    Ok(())
}
