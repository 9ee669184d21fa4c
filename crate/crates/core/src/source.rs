//! Physical description of one photon-pair source.

use serde::{Deserialize, Serialize};

use crate::density::{PumpSpectrum, SpectralFilter};
use crate::dispersion::{CrystalConfig, GeometryConfig};
use crate::kernel::BeamGeometry;

/// Everything the kernel needs apart from quadrature settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    pub crystal: CrystalConfig,
    pub geometry: GeometryConfig,
    pub beams: BeamGeometry,
    pub pump: PumpSpectrum,
    /// Idler-arm interference filter; `None` for an unfiltered source.
    pub filter: Option<SpectralFilter>,
}
