use crate::error::Result;
use crate::measure::SpectralMeasure;
use crate::operator::JacobiOperator;
use crate::spectrum::{self, AuditReport, BandStructure, EigenvalueInfo, PhaseFunction};
use crate::transfer::MonodromyData;

/// Everything spectral about one operator, computed once.
#[derive(Debug, Clone)]
pub struct SpectralModel {
    pub operator: JacobiOperator,
    pub monodromy: MonodromyData,
    pub bands: BandStructure,
    pub eigenvalues: Vec<EigenvalueInfo>,
    pub measure: SpectralMeasure,
}

impl SpectralModel {
    pub fn new(op: &JacobiOperator) -> Result<Self> {
        let monodromy = MonodromyData::new(op);
        let bands = spectrum::band_structure(&monodromy)?;
        let eigenvalues = spectrum::point_spectrum(&monodromy, &bands)?;
        let measure = SpectralMeasure::new(&monodromy, &bands, &eigenvalues);
        Ok(Self { operator: op.clone(), monodromy, bands, eigenvalues, measure })
    }

    pub fn period(&self) -> usize {
        self.operator.period()
    }

    /// Band function of band `j` (1-based).
    pub fn phase(&self, j: usize) -> Result<PhaseFunction<'_>> {
        PhaseFunction::new(&self.monodromy, &self.bands, j)
    }

    pub fn audit(&self) -> AuditReport {
        spectrum::stationary_audit(&self.monodromy, &self.bands)
    }
}
