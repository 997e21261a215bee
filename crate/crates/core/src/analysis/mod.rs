//! Configuration, CSV emission, trend metrics and the coupon-collector oracle.

pub mod config;
pub mod csv;
pub mod oracle;
pub mod trend;

pub use self::config::parse_config;
pub use self::csv::{format_sig6, read_series_csv, write_series_csv, write_series_csv_file};
pub use self::oracle::coupon_oracle;
pub use self::trend::{trend_report, TrendReport};
