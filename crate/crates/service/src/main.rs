use std::net::SocketAddr;
use std::path::PathBuf;

use treelogic_service::{router, AppState};

#[tokio::main]
async fn main() -> std::io::Result<()> {
    tracing_subscriber::fmt::init();
    let port: u16 = std::env::var("TREELOGIC_PORT")
        .ok()
        .and_then(|p| p.parse().ok())
        .unwrap_or(8080);
    let state = match std::env::var_os("TREELOGIC_SNAPSHOT_DIR") {
        Some(dir) => AppState::with_snapshots(PathBuf::from(dir))?,
        None => AppState::new(),
    };
    let origin = std::env::var("TREELOGIC_UI_ORIGIN").ok();
    let app = router(state, origin.as_deref());
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
