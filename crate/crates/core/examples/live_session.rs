//! Drive a live session: serve it over HTTP, then label the most
//! prominent mistake shown by the explanation a few times.
//!
//! Pass `--serve` to keep the server running for a browser client.

use std::net::SocketAddr;
use std::sync::Arc;

use xgl::engine::ExperimentConfig;
use xgl::interface::server::spawn;
use xgl::interface::{LabelRequest, SessionService};

fn main() -> xgl::Result<()> {
    let service = Arc::new(SessionService::with_config(&ExperimentConfig::default())?);
    let addr = spawn(SocketAddr::from(([127, 0, 0, 1], 0)), Arc::clone(&service))?;
    println!("session at http://{addr}/state");

    for _ in 0..5 {
        let view = service.state()?;
        // A supervisor who trusts the explanation: pick the unlabeled point
        // whose true label disagrees with its cluster's summary.
        let pick = view.points.iter().filter(|p| !p.labeled).find(|p| {
            let cluster = view.explanation.cluster_of(p.index);
            cluster.is_some_and(|c| view.explanation.clusters[c].majority_label != p.truth)
        });
        let Some(p) = pick else { break };
        let next = service.submit_label(&LabelRequest::for_index(view.model_version, p.index, p.truth))?;
        println!(
            "labeled #{} as {}: version {}, test F1 {:.3}",
            p.index,
            p.truth,
            next.model_version,
            next.f1_history.last().unwrap()
        );
    }

    if std::env::args().any(|a| a == "--serve") {
        println!("serving; Ctrl-C to stop");
        loop {
            std::thread::park();
        }
    }
    Ok(())
}
