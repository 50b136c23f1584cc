//! Operational shell: bulletin store, publish pipeline and HTTP service.

mod bulletin;
mod publish;
pub mod server;
mod store;

pub use bulletin::{Bulletin, BulletinSummary, DangerDescription, Status};
pub use publish::{
    publish, publish_with, verify_artifacts, ArtifactFs, Manifest, ManifestFile, PublishError, StdFs, VerifyError,
};
pub use store::{check_description, copy_description, valid_bulletin_id, Store, StoreError};
